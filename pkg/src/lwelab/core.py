"""LWE parameters, secrets, sample generation, and residual-based verification.

An LWE sample is a pair (a, b) with b = a.s + e mod q for a secret s and a
small rounded-Gaussian error e.  Everything downstream (reduction, analytics,
recovery) works on `SampleSet` objects produced here.  Coordinates are stored
canonically in [0, q); `center` maps them to the symmetric interval
(-q/2, q/2] when signed arithmetic is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .rng import make_rng

__all__ = [
    "SecretDist",
    "SampleKind",
    "LweParams",
    "Secret",
    "LweSample",
    "SampleSet",
    "VerifyReport",
    "GAUSSIAN_SECRET_STD",
    "center",
    "mod_dot",
    "sample_secret",
    "gen_samples",
    "residuals",
    "verify_secret",
    "save_samples",
    "load_samples",
]

# Narrow Gaussian secrets draw nonzero entries from round(Normal(0, 3^2)).
GAUSSIAN_SECRET_STD = 3.0

# Acceptance rule for residual verification: a guess is accepted when at
# least this fraction of centered residuals lands strictly inside (-q/4, q/4).
VERIFY_SMALL_FRACTION = 0.99

_INT64_SAFE = 2**62


class SecretDist(str, Enum):
    BINARY = "binary"
    TERNARY = "ternary"
    GAUSSIAN = "gaussian"


class SampleKind(str, Enum):
    ORIGINAL = "original"
    REDUCED = "reduced"
    HELD_OUT = "heldout"


@dataclass(frozen=True)
class LweParams:
    """Problem parameters: dimension n, modulus q, error width sigma_e."""

    n: int
    q: int
    sigma_e: float = 3.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got n={self.n}")
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got q={self.q}")
        if self.q >= 2**63:
            raise ValueError("modulus must fit in a 64-bit signed integer")
        if not 0 <= self.sigma_e < self.q / 16:
            raise ValueError(
                f"sigma_e={self.sigma_e} must satisfy 0 <= sigma_e < q/16 = {self.q / 16}"
            )


@dataclass(frozen=True)
class Secret:
    """Secret vector plus its distribution tag.  h is the nonzero count."""

    dist: SecretDist
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 1:
            raise ValueError("secret entries must be a 1-d integer vector")
        if self.dist is SecretDist.BINARY and not np.isin(entries, (0, 1)).all():
            raise ValueError("binary secret entries must lie in {0, 1}")
        if self.dist is SecretDist.TERNARY and not np.isin(entries, (-1, 0, 1)).all():
            raise ValueError("ternary secret entries must lie in {-1, 0, 1}")
        if self.dist is SecretDist.GAUSSIAN:
            bound = 6 * GAUSSIAN_SECRET_STD
            if np.abs(entries).max(initial=0) > bound:
                raise ValueError(f"gaussian secret entries must satisfy |s_i| <= {bound}")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def h(self) -> int:
        return int(np.count_nonzero(self.entries))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.entries)


class LweSample(NamedTuple):
    a: np.ndarray
    b: int


@dataclass
class SampleSet:
    """A batch of samples sharing one parameter set.

    `a` is (count, n) and `b` is (count,), both int64 in [0, q).  `errors`
    is the generation log (the exact e used per sample); it is carried
    in memory for tests and diagnostics but never serialized.
    """

    params: LweParams
    a: np.ndarray
    b: np.ndarray
    kind: SampleKind
    seed: int
    errors: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.a = np.asarray(self.a, dtype=np.int64)
        self.b = np.asarray(self.b, dtype=np.int64)
        if self.a.ndim != 2 or self.a.shape[1] != self.params.n:
            raise ValueError(f"a must be (count, {self.params.n}), got {self.a.shape}")
        if self.b.shape != (self.a.shape[0],):
            raise ValueError("b must have one value per row of a")

    def __len__(self) -> int:
        return self.a.shape[0]

    def sample(self, i: int) -> LweSample:
        return LweSample(self.a[i], int(self.b[i]))


class VerifyReport(NamedTuple):
    accepted: bool
    residual_std: float
    frac_small: float


def center(v, q: int):
    """Map v to its representative in (-q/2, q/2], elementwise for arrays.

    center(v, q) == v (mod q) always holds.
    """
    if np.isscalar(v) or isinstance(v, (int, np.integer)):
        c = int(v) % q
        return c - q if 2 * c > q else c
    c = np.mod(v, q)
    return np.where(2 * c > q, c - q, c)


def mod_dot(a: np.ndarray, s: np.ndarray, q: int) -> np.ndarray:
    """Row-wise a.s mod q, falling back to exact python ints near overflow."""
    a = np.asarray(a)
    s = np.asarray(s)
    smax = int(np.abs(s).max(initial=0))
    if smax and q * smax * a.shape[-1] >= _INT64_SAFE:
        prod = a.astype(object) @ s.astype(object)
        return np.mod(prod, q).astype(np.int64)
    return np.mod(a.astype(np.int64) @ s.astype(np.int64), q)


def sample_secret(params: LweParams, dist: SecretDist, h: int, seed: int) -> Secret:
    """Draw a secret with exactly h nonzero entries at uniform positions.

    Binary nonzeros are 1; ternary nonzeros are +-1 equiprobably; Gaussian
    nonzeros are round(Normal(0, 3^2)) resampled until nonzero.
    """
    dist = SecretDist(dist)
    if h <= 0:
        raise ValueError("h must be positive (an all-zero secret is degenerate)")
    if h > params.n:
        raise ValueError(f"h={h} exceeds dimension n={params.n}")
    rng = make_rng(seed, "secret", dist.value)
    entries = np.zeros(params.n, dtype=np.int64)
    positions = rng.choice(params.n, size=h, replace=False)
    if dist is SecretDist.BINARY:
        values = np.ones(h, dtype=np.int64)
    elif dist is SecretDist.TERNARY:
        values = rng.choice(np.array([-1, 1], dtype=np.int64), size=h)
    else:
        bound = int(6 * GAUSSIAN_SECRET_STD)
        values = np.zeros(h, dtype=np.int64)
        todo = np.arange(h)
        while todo.size:
            draw = np.rint(rng.normal(0.0, GAUSSIAN_SECRET_STD, size=todo.size))
            draw = np.clip(draw, -bound, bound).astype(np.int64)
            values[todo] = draw
            todo = todo[draw == 0]
    entries[positions] = values
    return Secret(dist, entries)


def gen_samples(
    params: LweParams,
    secret: Secret,
    count: int | None = None,
    seed: int = 0,
    kind: SampleKind = SampleKind.ORIGINAL,
) -> SampleSet:
    """Generate `count` samples (default 4n) with b = a.s + e mod q."""
    if secret.n != params.n:
        raise ValueError("secret dimension does not match params")
    if count is None:
        count = 4 * params.n
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = make_rng(seed, "samples")
    a = rng.integers(0, params.q, size=(count, params.n), dtype=np.int64)
    e = np.rint(rng.normal(0.0, params.sigma_e, size=count)).astype(np.int64)
    b = np.mod(mod_dot(a, secret.entries, params.q) + e, params.q)
    return SampleSet(params=params, a=a, b=b, kind=kind, seed=seed, errors=e)


def residuals(guess: Secret, samples: SampleSet) -> np.ndarray:
    """Centered a.s' - b mod q for every sample; equals -e for the true secret."""
    if guess.n != samples.params.n:
        raise ValueError("guess dimension does not match sample set")
    q = samples.params.q
    return center(mod_dot(samples.a, guess.entries, q) - samples.b, q)


def verify_secret(guess: Secret, originals: SampleSet) -> VerifyReport:
    """Residual test on the original samples.

    Accept when at least 99% of centered residuals satisfy |x| < q/4.  For
    the true secret residuals equal -e, so this accepts whenever sigma_e is
    small against q; a wrong guess gives near-uniform residuals and lands at
    frac_small ~ 0.5.
    """
    if len(originals) == 0:
        raise ValueError("cannot verify against an empty sample set")
    q = originals.params.q
    x = residuals(guess, originals)
    frac_small = float(np.mean(np.abs(x) < q / 4))
    return VerifyReport(
        accepted=frac_small >= VERIFY_SMALL_FRACTION,
        residual_std=float(np.std(x.astype(np.float64))),
        frac_small=frac_small,
    )


def save_samples(samples: SampleSet, path) -> None:
    """Write the plain-text sample format: one header line, one line per sample."""
    p = samples.params
    header = (
        f"n={p.n} q={p.q} sigma_e={p.sigma_e:g} "
        f"kind={samples.kind.value} seed={samples.seed} count={len(samples)}"
    )
    rows = np.concatenate([samples.a, samples.b[:, None]], axis=1)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def parse_header(line: str) -> dict:
    out = {}
    for item in line.split():
        key, _, value = item.partition("=")
        if not _:
            raise ValueError(f"malformed header field {item!r}")
        out[key] = value
    return out


def load_samples(path) -> SampleSet:
    path = Path(path)
    with open(path) as fh:
        header = parse_header(fh.readline().strip())
        try:
            params = LweParams(
                n=int(header["n"]), q=int(header["q"]), sigma_e=float(header["sigma_e"])
            )
            kind = SampleKind(header["kind"])
            seed = int(header["seed"])
            count = int(header["count"])
        except KeyError as exc:
            raise ValueError(f"{path}: missing header field {exc}") from exc
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if data.shape != (count, params.n + 1):
        raise ValueError(
            f"{path}: expected {count} rows of {params.n + 1} integers, got {data.shape}"
        )
    return SampleSet(params=params, a=data[:, :-1], b=data[:, -1], kind=kind, seed=seed)
