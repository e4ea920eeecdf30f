#!/usr/bin/env python3
"""Transforms that give a stuck attack another roll of the dice.

Permuting the columns of A keeps the unreduced instance's NoMod unchanged
but re-randomizes what lattice reduction does to it, so a failed secret can
become recoverable; recovering the permuted secret and applying the inverse
permutation restores the original.  Dimension reduction gambles that some
coordinates are zero and drops them; Hamming reduction flips a set S of
suspected ones (a_i -> -a_i, b -> b - sum_S a_i), lowering the weight when
the guess is mostly right.
"""

import numpy as np

from lwelab import (
    CheatingOracle,
    LweParams,
    SampleKind,
    SecretDist,
    dimension_reduce,
    gen_samples,
    hamming_reduce,
    nomod,
    permute_instance,
    recover,
    sample_secret,
    verify_secret,
)
from lwelab.tricks import (
    hamming_secret,
    permuted_secret,
    reduced_secret,
    restore_permuted_secret,
)

params = LweParams(n=32, q=3329, sigma_e=3.0)
secret = sample_secret(params, SecretDist.BINARY, 3, seed=1)
originals = gen_samples(params, secret, seed=2)

# --- permutation trick -----------------------------------------------------
permuted, pi = permute_instance(originals, seed=3)
sec_p = permuted_secret(secret, pi)
print("permutation keeps b and the unreduced NoMod:")
print(f"  nomod original {nomod(originals, secret).percentage:.1f}%  "
      f"permuted {nomod(permuted, sec_p).percentage:.1f}%")

heldout = gen_samples(params, sec_p, count=128, seed=4, kind=SampleKind.HELD_OUT)
oracle = CheatingOracle(secret=sec_p, params=params, noise_std=3.0, seed=5)
result = recover(oracle, heldout, permuted, SecretDist.BINARY,
                 h_range=range(1, 5), seed=6)
restored = restore_permuted_secret(result.guess, pi)
print(f"  attack on the permuted instance: {result.status.value}; "
      f"inverse permutation restores the original secret: "
      f"{np.array_equal(restored.entries, secret.entries)}")

# --- dimension reduction ---------------------------------------------------
zeros = np.flatnonzero(secret.entries == 0)[:10]
smaller = dimension_reduce(originals, zeros)
sec_small, valid = reduced_secret(secret, zeros)
print(f"\ndropping 10 true zeros: n {params.n} -> {smaller.params.n}, "
      f"instance stays valid: {valid}, "
      f"verifies: {verify_secret(sec_small, smaller).accepted}")

bad = dimension_reduce(originals, [int(secret.support[0])])
sec_bad, valid = reduced_secret(secret, [int(secret.support[0])])
print(f"dropping a nonzero coordinate: valid={valid}, "
      f"verifies: {verify_secret(sec_bad, bad).accepted} (residuals go uniform)")

# --- hamming reduction -----------------------------------------------------
flip = secret.support[:2]  # flip two known ones
flipped = hamming_reduce(originals, flip, SecretDist.BINARY)
sec_f = hamming_secret(secret, flip)
print(f"\nflipping 2 ones: implied weight h {secret.h} -> {sec_f.h}, "
      f"verifies on the transformed instance: "
      f"{verify_secret(sec_f, flipped).accepted}")
twice = hamming_reduce(hamming_reduce(originals, flip), flip)
print("applying the same flip twice is the identity:",
      np.array_equal(twice.a, originals.a) and np.array_equal(twice.b, originals.b))
