#!/usr/bin/env python3
"""Turn mod-q integers into two-token sequences for a sequence model.

A value v becomes (hi, lo) = (v div B, (v mod B) div r).  The base B is
about q/8 so the hi digit needs at most 8 symbols, and the bucket size r
caps the lo vocabulary at 2000 tokens at the price of |error| < r.
"""

import tempfile

import numpy as np

from lwelab import LweParams, SecretDist, TokenScheme, decode, encode, export_dataset
from lwelab import gen_samples, sample_secret

for q in (3329, 842779, 2199023255531):
    scheme = TokenScheme.for_modulus(q)
    print(f"q={q}: B={scheme.B}, r={scheme.r}, "
          f"vocab = {scheme.hi_vocab} hi + {scheme.lo_vocab} lo tokens")

scheme = TokenScheme(q=842779, B=105348, r=64)
v = 842778
hi, lo = encode(v, scheme)
print(f"\nencode({v}) -> ({hi}, {lo}); decode -> {decode(hi, lo, scheme)} "
      f"(bucket error {v - decode(hi, lo, scheme)} < r={scheme.r})")

rng = np.random.default_rng(0)
values = rng.integers(0, scheme.q, size=100_000)
hi, lo = encode(values, scheme)
err = np.abs(values - decode(hi, lo, scheme))
print(f"100k random round trips: max error {err.max()} (< {scheme.r}), "
      f"mean {err.mean():.1f}")

# exact when r = 1
small = TokenScheme(q=3329, B=417, r=1)
v = np.arange(3329)
hi, lo = encode(v, small)
print("q=3329, r=1 is lossless:", np.array_equal(decode(hi, lo, small), v))

params = LweParams(n=8, q=3329, sigma_e=3.0)
secret = sample_secret(params, SecretDist.BINARY, 2, seed=1)
samples = gen_samples(params, secret, count=5, seed=2)
with tempfile.NamedTemporaryFile("r", suffix=".txt") as fh:
    export_dataset(samples, small, fh.name)
    lines = open(fh.name).read().splitlines()
print("\ntoken file header:", lines[0])
print("first line (2n input tokens + 2 target tokens):")
print(" ", lines[1])
