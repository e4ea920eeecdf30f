"""Token file I/O and batching.

A token file starts with a header line `q=.. B=.. r=.. n=..` followed by one
line per sample: 2n input tokens (hi lo per coordinate) then the 2 target
tokens for b.  Token values below n_hi are hi digits; lo bucket indices are
shifted by n_hi into a single vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

__all__ = ["TokenFile", "load_token_file", "encode_values", "decode_tokens"]

LO_VOCAB_LIMIT = 2000


@dataclass
class TokenFile:
    q: int
    B: int
    r: int
    n: int
    inputs: torch.Tensor   # (count, 2n) int64, vocabulary-shifted
    targets: torch.Tensor  # (count, 2) int64: hi digit, lo bucket

    @property
    def n_hi(self) -> int:
        return (self.q - 1) // self.B + 1

    @property
    def n_lo(self) -> int:
        return -(-self.B // self.r)

    @property
    def vocab_size(self) -> int:
        return self.n_hi + self.n_lo

    def __len__(self) -> int:
        return self.inputs.shape[0]


def _shift_tokens(hi: np.ndarray, lo: np.ndarray, n_hi: int) -> np.ndarray:
    out = np.empty(hi.shape[:-1] + (2 * hi.shape[-1],), dtype=np.int64)
    out[..., 0::2] = hi
    out[..., 1::2] = lo + n_hi
    return out


def encode_values(values: np.ndarray, q: int, B: int, r: int) -> np.ndarray:
    """Vector of integers in [0, q) -> interleaved, vocabulary-shifted tokens."""
    values = np.asarray(values)
    n_hi = (q - 1) // B + 1
    return _shift_tokens(values // B, (values % B) // r, n_hi)


def decode_tokens(hi: np.ndarray, lo: np.ndarray, q: int, B: int, r: int) -> np.ndarray:
    """Predicted (hi digit, lo bucket) -> integer in [0, q)."""
    return np.minimum(np.asarray(hi) * B + np.asarray(lo) * r, q - 1)


def load_token_file(path) -> TokenFile:
    with open(path) as fh:
        header = dict(item.split("=") for item in fh.readline().split())
        q, B, r, n = (int(header[k]) for k in ("q", "B", "r", "n"))
        n_lo = -(-B // r)
        if n_lo > LO_VOCAB_LIMIT:
            raise ValueError(f"lo vocabulary {n_lo} exceeds {LO_VOCAB_LIMIT}")
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if data.shape[1] != 2 * n + 2:
        raise ValueError(f"{path}: expected {2 * n + 2} tokens per line, got {data.shape[1]}")
    n_hi = (q - 1) // B + 1
    inputs = data[:, :-2].copy()
    inputs[:, 1::2] += n_hi  # shift lo buckets into the shared vocabulary
    targets = data[:, -2:].copy()
    if inputs[:, 0::2].max() >= n_hi or targets[:, 0].max() >= n_hi:
        raise ValueError("hi digit exceeds the vocabulary implied by the header")
    if targets[:, 1].max() >= n_lo:
        raise ValueError("lo bucket exceeds the vocabulary implied by the header")
    return TokenFile(
        q=q, B=B, r=r, n=n,
        inputs=torch.from_numpy(inputs),
        targets=torch.from_numpy(targets),
    )
