"""Classical uSVP baseline via Kannan's embedding.

From m = n samples build the (m + n + 1)-dimensional lattice generated by

    [ q*I_m   0      0 ]
    [ A^T     I_n    0 ]
    [ b       0      M ]

which contains the short vector (-e, s, -M).  The q-rows lead (the same row
arrangement the preprocessing embedding uses), reduction runs as LLL plus
BKZ tours on the shared engine with its adaptive precision ladder, and after
every tour each basis row with last coordinate +-M is decoded into a secret
candidate and pushed through residual verification, so the attack stops the
moment the embedding exposes the secret.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import (
    GAUSSIAN_SECRET_STD,
    SampleSet,
    Secret,
    SecretDist,
    VerifyReport,
    verify_secret,
)
from .lattice import ENUM_BLOCKSIZE_CAP, ReductionEngine
from .reduction import write_metrics

__all__ = ["UsvpConfig", "UsvpResult", "build_usvp_basis", "usvp_attack"]


@dataclass(frozen=True)
class UsvpConfig:
    blocksize: int = 16
    max_loops: int = 20
    embedding_factor: int = 1  # Kannan's M
    check_each_loop: bool = True
    delta: float = 0.99
    precision_bits: tuple = (53, 106, 212)
    rearranged: bool = True  # q-rows first, as in the preprocessing embedding

    def __post_init__(self) -> None:
        if self.blocksize < 2 or self.blocksize > ENUM_BLOCKSIZE_CAP:
            raise ValueError(f"blocksize must lie in [2, {ENUM_BLOCKSIZE_CAP}]")
        if self.embedding_factor < 1:
            raise ValueError("embedding factor M must be >= 1")
        if self.max_loops < 1:
            raise ValueError("max_loops must be >= 1")


@dataclass
class UsvpResult:
    secret: Secret | None
    report: VerifyReport | None
    loops_used: int
    wall_time: float
    best_norm: float  # euclidean norm of the shortest basis vector seen


def build_usvp_basis(
    a: np.ndarray, b: np.ndarray, q: int, m_factor: int = 1, rearranged: bool = True
) -> np.ndarray:
    """Kannan embedding basis of dimension (m + n + 1)."""
    m, n = a.shape
    d = m + n + 1
    basis = np.zeros((d, d), dtype=np.int64)
    if rearranged:
        basis[:m, :m] = q * np.eye(m, dtype=np.int64)
        basis[m : m + n, :m] = a.T
        basis[m : m + n, m : m + n] = np.eye(n, dtype=np.int64)
    else:
        basis[:n, :m] = a.T
        basis[:n, m : m + n] = np.eye(n, dtype=np.int64)
        basis[n : m + n, :m] = q * np.eye(m, dtype=np.int64)
    basis[-1, :m] = b
    basis[-1, -1] = m_factor
    return basis


def _infer_dist(entries: np.ndarray) -> SecretDist | None:
    if np.isin(entries, (0, 1)).all():
        return SecretDist.BINARY
    if np.isin(entries, (-1, 0, 1)).all():
        return SecretDist.TERNARY
    if np.abs(entries).max(initial=0) <= 6 * GAUSSIAN_SECRET_STD:
        return SecretDist.GAUSSIAN
    return None


def _candidates(basis: np.ndarray, m: int, n: int, m_factor: int):
    for row in np.asarray(basis, dtype=np.int64):
        if row[-1] == -m_factor:
            yield row[m : m + n]
        elif row[-1] == m_factor:
            yield -row[m : m + n]


def _check_basis(basis: np.ndarray, m: int, n: int, m_factor: int, originals: SampleSet):
    for entries in _candidates(basis, m, n, m_factor):
        dist = _infer_dist(entries)
        if dist is None:
            continue
        guess = Secret(dist, entries)
        report = verify_secret(guess, originals)
        if report.accepted:
            return guess, report
    return None, None


def usvp_attack(
    originals: SampleSet, cfg: UsvpConfig = UsvpConfig(), metrics_path=None
) -> UsvpResult:
    """Reduce the embedding, checking for the secret after every tour."""
    n = originals.params.n
    q = originals.params.q
    if len(originals) < n:
        raise ValueError(f"need at least n={n} samples, have {len(originals)}")
    a = originals.a[:n]
    b = originals.b[:n]
    m = n
    basis = build_usvp_basis(a, b, q, cfg.embedding_factor, cfg.rearranged)
    engine = ReductionEngine(basis, cfg.precision_bits)
    start = time.perf_counter()
    records = []

    def best_norm() -> float:
        rows = np.asarray(engine.B, dtype=np.float64)
        norms = np.sqrt((rows * rows).sum(axis=1))
        return float(norms[norms > 0].min())

    engine.lll(cfg.delta)
    loops = 0
    secret, report = _check_basis(engine.B, m, n, cfg.embedding_factor, originals)
    while secret is None and loops < cfg.max_loops:
        engine.bkz_tour(cfg.blocksize, cfg.delta)
        loops += 1
        records.append((loops, loops, best_norm() / q, time.perf_counter() - start))
        if cfg.check_each_loop or loops == cfg.max_loops:
            secret, report = _check_basis(engine.B, m, n, cfg.embedding_factor, originals)
    wall = time.perf_counter() - start
    if metrics_path is not None:
        write_metrics(metrics_path, records)
    return UsvpResult(
        secret=secret,
        report=report,
        loops_used=loops,
        wall_time=wall,
        best_norm=best_norm(),
    )
