"""Prediction oracles: the model stand-ins queried during secret recovery.

An oracle answers `query_batch(A) -> b_hat` (point predictions in [0, q)) and
may answer `dist_batch(A) -> P` (per-query probability vector over lo
tokens).  The cheating oracle computes answers from the true secret and is
the test instrument for every recovery path; its `confusion` knob
interpolates between an untrained model (uniform answers) and a converged
one.  The file oracle speaks the request/reply file protocol served by an
external trainer process.

Oracle file protocol
--------------------
request file:  SampleSet-style header (n, q, sigma_e, kind=query, seed,
               count) then one line of n integers per query vector.
reply file:    one line per query; either a single decimal b, or `D`
               followed by the lo-token probabilities.
Files are written to a temp name and renamed, so readers never see partial
content.  The exchange is strictly serial: one outstanding request.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .core import LweParams, Secret, mod_dot, parse_header
from .tokens import TokenScheme, encode

__all__ = [
    "CheatingOracle",
    "InDistributionOracle",
    "FileOracle",
    "OracleUnavailable",
    "ProtocolError",
    "write_query_file",
    "read_query_file",
    "serialize_replies",
    "parse_replies",
]


class OracleUnavailable(RuntimeError):
    """The serving side did not reply within the timeout."""


class ProtocolError(ValueError):
    """A reply file violated the oracle file protocol."""


@dataclass
class CheatingOracle:
    """Answers queries from the true secret; simulates a (partially) trained model.

    With probability `confusion` a query gets a uniform answer; otherwise
    the answer is a.s + round(Normal(0, noise_std^2)) mod q.  Every draw is
    keyed by the query vector's content, so answers are deterministic within
    a recovery pass and safe under concurrent or reordered querying.
    """

    secret: Secret
    params: LweParams
    noise_std: float = 0.0
    confusion: float = 0.0
    seed: int = 0
    scheme: TokenScheme | None = None
    smear_tokens: float = 2.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.confusion <= 1.0:
            raise ValueError("confusion must lie in [0, 1]")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        self._key = self.seed.to_bytes(8, "little", signed=False)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def supports_dist(self) -> bool:
        return self.scheme is not None

    def _draws(self, row: np.ndarray) -> tuple[float, int, float]:
        digest = hashlib.blake2b(row.tobytes(), digest_size=32, key=self._key).digest()
        u_conf = int.from_bytes(digest[0:8], "little") / 2**64
        uniform = int.from_bytes(digest[8:16], "little") % self.q
        u1 = (int.from_bytes(digest[16:24], "little") + 1) / (2**64 + 2)
        u2 = int.from_bytes(digest[24:32], "little") / 2**64
        gauss = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return u_conf, uniform, gauss

    def query_batch(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        base = mod_dot(a, self.secret.entries, self.q)
        out = np.empty(len(a), dtype=np.int64)
        for i, row in enumerate(a):
            u_conf, uniform, gauss = self._draws(row)
            if u_conf < self.confusion:
                out[i] = uniform
            else:
                out[i] = (base[i] + round(gauss * self.noise_std)) % self.q
        return out

    def dist_batch(self, a: np.ndarray) -> np.ndarray:
        """Gaussian-smeared point masses over lo tokens, centered at the prediction."""
        if self.scheme is None:
            raise ValueError("no token scheme configured; point predictions only")
        preds = self.query_batch(a)
        _, lo = encode(preds, self.scheme)
        n_lo = self.scheme.lo_vocab
        grid = np.arange(n_lo, dtype=np.float64)
        if self.smear_tokens <= 0:
            dist = np.zeros((len(preds), n_lo))
            dist[np.arange(len(preds)), lo] = 1.0
            return dist
        dist = np.exp(-((grid[None, :] - lo[:, None]) ** 2) / (2 * self.smear_tokens**2))
        return dist / dist.sum(axis=1, keepdims=True)


@dataclass
class InDistributionOracle:
    """Wrapper degrading answers on queries outside the training distribution.

    A trained model generalizes in-distribution: on vectors that look like
    its (reduced, small-stddev) training data it predicts well, elsewhere it
    is noise.  Queries whose centered entry stddev exceeds
    `std_threshold * q/sqrt(12)` are answered at `ood_confusion`.
    """

    inner: CheatingOracle
    std_threshold: float = 0.5
    ood_confusion: float = 1.0

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def q(self) -> int:
        return self.inner.q

    @property
    def supports_dist(self) -> bool:
        return self.inner.supports_dist

    def _split(self, a: np.ndarray) -> np.ndarray:
        q = self.q
        centered = np.mod(a, q).astype(np.float64)
        centered = np.where(2 * centered > q, centered - q, centered)
        return centered.std(axis=1) > self.std_threshold * q / math.sqrt(12.0)

    def query_batch(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        ood = self._split(a)
        out = self.inner.query_batch(a)
        if ood.any():
            noisy = CheatingOracle(
                secret=self.inner.secret,
                params=self.inner.params,
                noise_std=self.inner.noise_std,
                confusion=self.ood_confusion,
                seed=self.inner.seed,
            )
            out[ood] = noisy.query_batch(a[ood])
        return out

    def dist_batch(self, a: np.ndarray) -> np.ndarray:
        return self.inner.dist_batch(a)


def write_query_file(path, a: np.ndarray, q: int, seed: int = 0) -> None:
    a = np.asarray(a, dtype=np.int64)
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(f"n={a.shape[1]} q={q} sigma_e=0 kind=query seed={seed} count={len(a)}\n")
        for row in a:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
    os.replace(tmp, path)


def read_query_file(path) -> tuple[np.ndarray, dict]:
    with open(path) as fh:
        header = parse_header(fh.readline().strip())
        a = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    count, n = int(header["count"]), int(header["n"])
    if a.shape != (count, n):
        raise ProtocolError(f"{path}: expected {count} x {n} queries, got {a.shape}")
    return a, header


def serialize_replies(replies) -> str:
    lines = []
    for reply in replies:
        if isinstance(reply, (int, np.integer)):
            lines.append(str(int(reply)))
        else:
            probs = " ".join(repr(float(p)) for p in reply)
            lines.append(f"D {probs}")
    return "\n".join(lines) + "\n"


def parse_replies(text: str):
    """Parse reply lines into ints and/or probability arrays."""
    replies = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "D":
                probs = np.array([float(p) for p in parts[1:]], dtype=np.float64)
                if probs.size == 0:
                    raise ValueError("empty distribution")
                replies.append(probs)
            else:
                if len(parts) != 1:
                    raise ValueError("point reply must be a single integer")
                replies.append(int(parts[0]))
        except ValueError as exc:
            raise ProtocolError(f"reply line {lineno}: {exc}") from exc
    return replies


class FileOracle:
    """Client side of the oracle file protocol (strictly serial).

    Each batch becomes one request file `req-<k>.txt` in `request_dir`; the
    server must answer with `rep-<k>.txt` in `reply_dir`.  The reply mode
    (point vs distribution) is discovered from the first reply.
    """

    def __init__(self, request_dir, reply_dir, params: LweParams,
                 timeout: float = 60.0, poll: float = 0.05):
        self.request_dir = request_dir
        self.reply_dir = reply_dir
        self.params = params
        self.timeout = timeout
        self.poll = poll
        self.counter = 0
        self.mode: str | None = None  # "point" | "dist", discovered lazily
        os.makedirs(request_dir, exist_ok=True)
        os.makedirs(reply_dir, exist_ok=True)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def supports_dist(self) -> bool:
        if self.mode is None:
            self.probe()
        return self.mode == "dist"

    def probe(self) -> str:
        """Discover the reply mode with a single zero-vector query."""
        replies = self._roundtrip(np.zeros((1, self.n), dtype=np.int64))
        self.mode = "dist" if isinstance(replies[0], np.ndarray) else "point"
        return self.mode

    def _roundtrip(self, a: np.ndarray):
        self.counter += 1
        name = f"{self.counter:06d}"
        request = os.path.join(self.request_dir, f"req-{name}.txt")
        reply = os.path.join(self.reply_dir, f"rep-{name}.txt")
        write_query_file(request, a, self.q, seed=self.counter)
        deadline = time.monotonic() + self.timeout
        while not os.path.exists(reply):
            if time.monotonic() > deadline:
                raise OracleUnavailable(
                    f"no reply {reply} within {self.timeout:.0f}s"
                )
            time.sleep(self.poll)
        with open(reply) as fh:
            replies = parse_replies(fh.read())
        if len(replies) != len(a):
            raise ProtocolError(
                f"{reply}: {len(replies)} replies for {len(a)} queries"
            )
        return replies

    def query_batch(self, a: np.ndarray) -> np.ndarray:
        replies = self._roundtrip(np.asarray(a, dtype=np.int64))
        if any(isinstance(r, np.ndarray) for r in replies):
            self.mode = "dist"
            raise ProtocolError("server sent distributions; use dist_batch")
        self.mode = "point"
        out = np.array(replies, dtype=np.int64)
        if ((out < 0) | (out >= self.q)).any():
            raise ProtocolError("point reply outside [0, q)")
        return out

    def dist_batch(self, a: np.ndarray) -> np.ndarray:
        replies = self._roundtrip(np.asarray(a, dtype=np.int64))
        if not all(isinstance(r, np.ndarray) for r in replies):
            self.mode = "point"
            raise ProtocolError("server sent point replies; use query_batch")
        self.mode = "dist"
        width = {len(r) for r in replies}
        if len(width) != 1:
            raise ProtocolError("distribution replies have inconsistent width")
        return np.stack(replies)
