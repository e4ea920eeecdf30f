"""Instance transforms that re-randomize or shrink a stubborn problem.

Each transform rewrites a sample set into an equivalent instance with a
related secret and keeps enough bookkeeping to invert the relation once the
transformed instance is cracked:

* column permutation: a' = a permuted, secret s' = s permuted, b unchanged.
  Preprocessing the permuted instance yields a fresh training distribution
  (and a fresh NoMod draw) for the same underlying secret.
* dimension reduction: drop coordinates believed zero; valid exactly when
  the dropped secret entries really are zero.
* Hamming reduction (binary secrets): negate a on an index set S and send
  b to b - sum_{i in S} a_i; the implied secret flips s_i -> 1 - s_i on S,
  so if most of S was 1 the new instance is sparser.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import LweParams, SampleKind, SampleSet, Secret, SecretDist
from .rng import make_rng

__all__ = [
    "Permutation",
    "random_permutation",
    "permute_instance",
    "permuted_secret",
    "restore_permuted_secret",
    "dimension_reduce",
    "reduced_secret",
    "hamming_reduce",
    "hamming_secret",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection on coordinates, stored as an index vector.

    Applying to a vector v gives v[pi]; the implied secret of a permuted
    instance is s[pi].
    """

    pi: np.ndarray

    def __post_init__(self) -> None:
        pi = np.asarray(self.pi, dtype=np.int64)
        object.__setattr__(self, "pi", pi)
        if sorted(pi.tolist()) != list(range(len(pi))):
            raise ValueError("not a bijection on {0..n-1}")

    @property
    def n(self) -> int:
        return len(self.pi)

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.pi] = np.arange(self.n)
        return Permutation(inv)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[..., self.pi]


def random_permutation(n: int, seed: int) -> Permutation:
    rng = make_rng(seed, "permutation")
    return Permutation(rng.permutation(n))


def permute_instance(
    originals: SampleSet, pi: Permutation | None = None, seed: int = 0
) -> tuple[SampleSet, Permutation]:
    """Column-permute every a; b is untouched.  Returns the set and the map."""
    if originals.kind is not SampleKind.ORIGINAL:
        raise ValueError("the permutation trick starts over from original samples")
    if pi is None:
        pi = random_permutation(originals.params.n, seed)
    if pi.n != originals.params.n:
        raise ValueError("permutation length does not match dimension")
    permuted = SampleSet(
        params=originals.params,
        a=pi.apply(originals.a),
        b=originals.b.copy(),
        kind=originals.kind,
        seed=originals.seed,
        errors=None if originals.errors is None else originals.errors.copy(),
    )
    return permuted, pi


def permuted_secret(secret: Secret, pi: Permutation) -> Secret:
    return Secret(secret.dist, pi.apply(secret.entries))


def restore_permuted_secret(guess: Secret, pi: Permutation) -> Secret:
    """Undo the permutation on a secret recovered from the permuted instance."""
    return Secret(guess.dist, pi.inverse().apply(guess.entries))


def dimension_reduce(samples: SampleSet, drop) -> SampleSet:
    """Remove the listed coordinates from every a; b is untouched.

    The result is a valid instance of dimension n - |drop| exactly when the
    dropped secret entries are zero; that premise is the caller's gamble.
    """
    n = samples.params.n
    drop = np.asarray(sorted({int(i) for i in drop}), dtype=np.int64)
    if drop.size and (drop.min() < 0 or drop.max() >= n):
        raise ValueError("drop indices out of range")
    keep = np.setdiff1d(np.arange(n), drop)
    params = LweParams(n=len(keep), q=samples.params.q, sigma_e=samples.params.sigma_e)
    return SampleSet(
        params=params,
        a=samples.a[:, keep],
        b=samples.b.copy(),
        kind=samples.kind,
        seed=samples.seed,
        errors=None if samples.errors is None else samples.errors.copy(),
    )


def reduced_secret(secret: Secret, drop) -> tuple[Secret, bool]:
    """Project the secret onto the kept coordinates.

    The second value reports whether the dropped entries were all zero,
    i.e. whether the reduced instance is faithful.
    """
    drop = np.asarray(sorted({int(i) for i in drop}), dtype=np.int64)
    keep = np.setdiff1d(np.arange(secret.n), drop)
    valid = not np.any(secret.entries[drop]) if drop.size else True
    return Secret(secret.dist, secret.entries[keep]), bool(valid)


def hamming_reduce(samples: SampleSet, flip, secret_dist: SecretDist | None = None) -> SampleSet:
    """Negate a on the flip set S and send b to b - sum_{i in S} a_i (mod q).

    The implied secret is s with s_i -> 1 - s_i on S, which only stays in a
    valid secret family for binary secrets.
    """
    if secret_dist is not None and SecretDist(secret_dist) is not SecretDist.BINARY:
        warnings.warn(
            "hamming reduction algebra assumes a binary secret; the implied "
            "secret of this instance leaves the declared family",
            stacklevel=2,
        )
    n, q = samples.params.n, samples.params.q
    flip = np.asarray(sorted({int(i) for i in flip}), dtype=np.int64)
    if flip.size and (flip.min() < 0 or flip.max() >= n):
        raise ValueError("flip indices out of range")
    a = samples.a.copy()
    b = samples.b.copy()
    if flip.size:
        shift = samples.a[:, flip].sum(axis=1) % q
        a[:, flip] = np.mod(-a[:, flip], q)
        b = np.mod(b - shift, q)
    return SampleSet(
        params=samples.params,
        a=a,
        b=b,
        kind=samples.kind,
        seed=samples.seed,
        errors=None if samples.errors is None else samples.errors.copy(),
    )


def hamming_secret(secret: Secret, flip) -> Secret:
    """The implied secret after hamming_reduce: s_i -> 1 - s_i on the flip set."""
    if secret.dist is not SecretDist.BINARY:
        raise ValueError("hamming reduction implies a binary-to-binary secret map")
    flip = np.asarray(sorted({int(i) for i in flip}), dtype=np.int64)
    entries = secret.entries.copy()
    if flip.size:
        entries[flip] = 1 - entries[flip]
    return Secret(SecretDist.BINARY, entries)
