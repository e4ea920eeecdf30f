#!/usr/bin/env python3
"""The classical comparison point: uSVP attack via Kannan's embedding.

n samples build a lattice of dimension 2n+1 containing the unusually short
vector (-e, s, -M).  Lattice reduction with a per-tour secret check pulls it
out; the q-rows lead the basis, mirroring the preprocessing embedding's row
arrangement.  At desk scale this cracks small instances outright, which the
distinguisher pipeline then has to beat on speed.
"""

import time

import numpy as np

from lwelab import LweParams, SecretDist, UsvpConfig, gen_samples, sample_secret, usvp_attack
from lwelab.usvp import build_usvp_basis

params = LweParams(n=16, q=521, sigma_e=1.0)
secret = sample_secret(params, SecretDist.BINARY, 2, seed=21)
originals = gen_samples(params, secret, seed=22)

basis = build_usvp_basis(originals.a[:16], originals.b[:16], params.q)
print(f"embedding dimension: {basis.shape[0]} (m + n + 1)")
k = (originals.a[:16] @ secret.entries + originals.errors[:16] - originals.b[:16]) // params.q
target = np.concatenate([-k, secret.entries, [-1]]) @ basis
print(f"planted vector (-e, s, -M) has norm {np.linalg.norm(target):.2f}; "
      f"a random basis row has norm {np.linalg.norm(basis[0]):.0f}")

start = time.time()
result = usvp_attack(originals, UsvpConfig(blocksize=16, max_loops=10))
elapsed = time.time() - start
print(f"\nattack finished in {elapsed:.1f}s after {result.loops_used} BKZ loops")
if result.secret is not None:
    print("recovered secret matches:",
          np.array_equal(result.secret.entries, secret.entries))
    print(f"verification: accepted={result.report.accepted}, "
          f"residual std {result.report.residual_std:.2f}")
else:
    print(f"no recovery within budget; shortest vector norm {result.best_norm:.1f}")

print("\nzero secrets are a free lunch (the error vector itself is short):")
from lwelab import Secret
zero = Secret(SecretDist.BINARY, np.zeros(12, dtype=int))
z_params = LweParams(n=12, q=521, sigma_e=1.0)
z_orig = gen_samples(z_params, zero, seed=30)
z_result = usvp_attack(z_orig, UsvpConfig(blocksize=8, max_loops=5))
print(f"  h=0 instance: recovered={z_result.secret is not None}, "
      f"loops={z_result.loops_used}")
