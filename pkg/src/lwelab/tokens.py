"""Two-token integer encoding for serializing samples to a sequence model.

A value v in [0, q) becomes (hi, lo) with hi = v div B and lo the bucket
index of the remainder: lo = (v mod B) div r.  B defaults to ceil(q/8)
(ceil(q/16) once q exceeds 30 bits) so hi stays below 8 (resp. 16), and the
bucket size r caps the lo vocabulary at ceil(B/r) <= 2000 tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SampleSet

__all__ = ["TokenScheme", "encode", "decode", "export_dataset", "read_token_header"]

LO_VOCAB_LIMIT = 2000


def default_base(q: int) -> int:
    return math.ceil(q / 16) if math.log2(q) > 30 else math.ceil(q / 8)


@dataclass(frozen=True)
class TokenScheme:
    q: int
    B: int
    r: int = 1

    @classmethod
    def for_modulus(cls, q: int, r: int | None = None) -> "TokenScheme":
        """Default scheme for q: B from the modulus size, bucket r as given.

        With r omitted, the smallest bucket that fits the vocabulary bound is
        used (1 whenever ceil(B) <= 2000 already holds).
        """
        base = default_base(q)
        if r is None:
            r = -(-base // LO_VOCAB_LIMIT)
        return cls(q=q, B=base, r=r)

    def __post_init__(self) -> None:
        if not 1 <= self.r <= self.B:
            raise ValueError(f"bucket size must satisfy 1 <= r <= B, got r={self.r}")
        if self.lo_vocab > LO_VOCAB_LIMIT:
            raise ValueError(
                f"ceil(B/r) = {self.lo_vocab} exceeds the {LO_VOCAB_LIMIT}-token bound"
            )

    @property
    def hi_vocab(self) -> int:
        return (self.q - 1) // self.B + 1

    @property
    def lo_vocab(self) -> int:
        return -(-self.B // self.r)

    @property
    def vocab_size(self) -> int:
        return self.hi_vocab + self.lo_vocab


def encode(v, scheme: TokenScheme):
    """Split v in [0, q) into (hi, lo) tokens; vectorized over arrays."""
    v = np.asarray(v)
    if (v < 0).any() or (v >= scheme.q).any():
        raise ValueError(f"values must lie in [0, {scheme.q})")
    hi = v // scheme.B
    lo = (v % scheme.B) // scheme.r
    if v.ndim == 0:
        return int(hi), int(lo)
    return hi, lo


def decode(hi, lo, scheme: TokenScheme):
    """Inverse of encode up to bucket quantization: |v - decode| < r."""
    v = np.asarray(hi) * scheme.B + np.asarray(lo) * scheme.r
    return int(v) if v.ndim == 0 else v


def export_dataset(samples: SampleSet, scheme: TokenScheme, path) -> None:
    """Write one line per sample: 2n input tokens then the 2 target tokens."""
    if scheme.q != samples.params.q:
        raise ValueError("token scheme modulus does not match sample set")
    try:
        with open(path, "w") as fh:
            fh.write(f"q={scheme.q} B={scheme.B} r={scheme.r} n={samples.params.n}\n")
            a_hi, a_lo = encode(samples.a, scheme)
            b_hi, b_lo = encode(samples.b, scheme)
            tokens = np.empty((len(samples), 2 * samples.params.n + 2), dtype=np.int64)
            tokens[:, 0:-2:2] = a_hi
            tokens[:, 1:-2:2] = a_lo
            tokens[:, -2] = b_hi
            tokens[:, -1] = b_lo
            for row in tokens:
                fh.write(" ".join(str(int(t)) for t in row) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing token file {path}: {exc}") from exc


def read_token_header(path) -> dict:
    with open(path) as fh:
        fields = dict(item.split("=") for item in fh.readline().split())
    return {k: int(v) for k, v in fields.items()}
