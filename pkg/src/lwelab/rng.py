"""Deterministic randomness shared by every module.

All sampling goes through a counter-based generator (Philox) keyed by a
64-bit seed, so the same seed reproduces the same bytes on any platform.
Sub-tasks derive independent streams by hashing string labels into the key;
content-addressed helpers derive draws from the *value* being processed,
which makes per-item randomness independent of iteration order.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["make_rng", "derive_seed", "content_rng"]

MAX_SEED = 2**64


def _digest(seed: int, parts: tuple) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(int(seed % MAX_SEED).to_bytes(8, "little"))
    for part in parts:
        if isinstance(part, bytes):
            h.update(b"\x00B" + part)
        else:
            h.update(b"\x00S" + str(part).encode())
    return h.digest()


def derive_seed(seed: int, *labels) -> int:
    """Deterministically derive a 64-bit child seed from a seed and labels."""
    return int.from_bytes(_digest(seed, labels)[:8], "little")


def make_rng(seed: int, *labels) -> np.random.Generator:
    """Philox generator keyed by ``seed`` and an optional label path."""
    key = int.from_bytes(_digest(seed, labels), "little")
    return np.random.Generator(np.random.Philox(key=key))


def content_rng(seed: int, payload: bytes) -> np.random.Generator:
    """Generator whose stream depends on the payload bytes, not on call order."""
    key = int.from_bytes(_digest(seed, (payload,)), "little")
    return np.random.Generator(np.random.Philox(key=key))
