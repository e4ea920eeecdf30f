#!/usr/bin/env python3
"""The distinguisher suite, driven by a cheating oracle.

The one-bit distinguisher perturbs one coordinate of a held-out vector by a
random K in (0.3q, 0.7q); if the secret bit there is zero the prediction
cannot move.  Ternary secrets additionally need the two-bit stage (swap and
+-c probes split the support into sign classes).  The cheating oracle
computes predictions from the true secret with tunable noise and confusion,
standing in for a model at any stage of training.
"""

import numpy as np

from lwelab import (
    CheatingOracle,
    LweParams,
    RecoveryStatus,
    SampleKind,
    SecretDist,
    gen_samples,
    one_bit_scores,
    recover,
    sample_secret,
    two_bit_classes,
)

params = LweParams(n=64, q=3329, sigma_e=3.0)
secret = sample_secret(params, SecretDist.TERNARY, 4, seed=5)
originals = gen_samples(params, secret, seed=6)
heldout = gen_samples(params, secret, count=128, seed=7, kind=SampleKind.HELD_OUT)
oracle = CheatingOracle(secret=secret, params=params, noise_std=3.0, seed=8)

print("true secret:", dict(zip(secret.support.tolist(),
                               secret.entries[secret.support].tolist())))

scores = one_bit_scores(oracle, heldout, seed=9)
top = np.argsort(scores.scores)[::-1][:6]
print("\ntop one-bit scores (coordinate: score):")
for i in top:
    mark = "*" if secret.entries[i] else " "
    print(f"  {mark} {i:3d}: {scores.scores[i]:>10.0f}")
print("zero-bit scores stay near the noise floor; nonzero bits tower above.")

tb = two_bit_classes(oracle, heldout, secret.support, seed=9)
print("\ntwo-bit sign classes: class A =", tb.class_a.tolist(),
      " class B =", tb.class_b.tolist())

result = recover(oracle, heldout, originals, SecretDist.TERNARY,
                 h_range=range(1, 6), seed=9)
print(f"full recovery: status={result.status.value}, h={result.h_used}, "
      f"exact={np.array_equal(result.guess.entries, secret.entries)}")

print("\nrecovery vs oracle quality (confusion = fraction of junk answers):")
for confusion in (0.0, 0.3, 0.6, 0.9, 1.0):
    wins = 0
    for seed in range(5):
        s = sample_secret(params, SecretDist.BINARY, 3, seed=20 + seed)
        orig = gen_samples(params, s, seed=40 + seed)
        held = gen_samples(params, s, count=32, seed=60 + seed,
                           kind=SampleKind.HELD_OUT)
        o = CheatingOracle(secret=s, params=params, noise_std=3.0,
                           confusion=confusion, seed=80 + seed)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = recover(o, held, orig, SecretDist.BINARY,
                        h_range=range(1, 5), seed=100 + seed)
        wins += r.status is RecoveryStatus.FULL
    print(f"  confusion {confusion}: {wins}/5 recovered")
