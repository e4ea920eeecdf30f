#!/usr/bin/env python3
"""Generate LWE data and verify secrets against it.

Walks through the core objects: parameters (n, q, sigma_e), secrets of the
three supported families, sample generation b = a.s + e mod q, centered
representatives, and the residual verification test that accepts the true
secret and rejects wrong guesses.
"""

import numpy as np

from lwelab import (
    LweParams,
    SecretDist,
    center,
    gen_samples,
    residuals,
    sample_secret,
    verify_secret,
)

params = LweParams(n=32, q=3329, sigma_e=3.0)
print(f"parameters: n={params.n}, q={params.q}, sigma_e={params.sigma_e}")

for dist in SecretDist:
    secret = sample_secret(params, dist, h=4, seed=1)
    print(f"\n{dist.value} secret, h={secret.h}")
    print("  nonzero entries:", dict(zip(secret.support.tolist(),
                                         secret.entries[secret.support].tolist())))

secret = sample_secret(params, SecretDist.TERNARY, h=4, seed=1)
samples = gen_samples(params, secret, seed=2)  # 4n samples by default
print(f"\ngenerated {len(samples)} samples; a entries uniform in [0, q)")
print("  first sample: a[:6] =", samples.a[0, :6], "... b =", samples.b[0])

# centered representatives live in (-q/2, q/2]
print("\ncentered(0, 3329) =", center(0, 3329))
print("centered(3328, 3329) =", center(3328, 3329))
print("centered residuals of the true secret equal -e exactly:",
      np.array_equal(residuals(secret, samples), -samples.errors))

report = verify_secret(secret, samples)
print(f"\nverify true secret: accepted={report.accepted}, "
      f"residual std {report.residual_std:.2f} (~sigma_e), "
      f"frac |x|<q/4: {report.frac_small:.3f}")

wrong = sample_secret(params, SecretDist.TERNARY, h=4, seed=99)
report = verify_secret(wrong, samples)
print(f"verify wrong guess: accepted={report.accepted}, "
      f"frac |x|<q/4: {report.frac_small:.3f} (~0.5, residuals look uniform)")
