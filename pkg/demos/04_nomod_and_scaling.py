#!/usr/bin/env python3
"""NoMod: why sequence models crack some instances and not others.

With all coordinates centered in (-q/2, q/2], a sample is "NoMod" when
x = a.s - b stays inside (-q/2, q/2): computing b needed no modular wrap.
Models learn the no-wrap relation easily, so the NoMod percentage of the
training set predicts attack success (empirical threshold: 67%).  Modelling
x as a Gaussian with sigma_x = sqrt(h) sigma_a turns this into a scaling
law: h is recoverable while sqrt(h) sigma_a <= q/2.
"""

import math

import numpy as np

from lwelab import LweParams, SecretDist, gen_samples, kickout_probability, nomod
from lwelab import sample_secret, scaling_predict
from lwelab.analysis import nomod_gaussian_estimate

params = LweParams(n=64, q=3329, sigma_e=3.0)

print("NoMod on uniform (unreduced) data vs the Gaussian model:")
print(f"{'h':>4} {'empirical':>10} {'model':>10} {'>=67%?':>7}")
for h in (1, 2, 3, 6, 12, 24):
    secret = sample_secret(params, SecretDist.BINARY, h, seed=h)
    samples = gen_samples(params, secret, count=50_000, seed=100 + h)
    report = nomod(samples, secret)
    model = nomod_gaussian_estimate(params.q, h)
    print(f"{h:>4} {report.percentage:>9.1f}% {model:>9.1f}% {str(report.threshold_hit):>7}")

print("\nuniform data has sigma_a = q/sqrt(12), so the law caps h at 3:")
uniform_sigma = params.q / math.sqrt(12)
print("  max_h =", scaling_predict(params, uniform_sigma, 3).max_h)

print("\nshrinking the entry range to [0, alpha*q) lifts the cap as 3/alpha^2:")
for alpha in (0.6, 0.55, 0.5, 0.45):
    pred = scaling_predict(params, alpha * uniform_sigma, 1)
    print(f"  alpha={alpha:4}: max_h = {pred.max_h}")

print("\npreprocessing to reduction factor f acts exactly like alpha = f:")
for factor in (0.77, 0.53, 0.43, 0.323):
    pred = scaling_predict(params, factor * uniform_sigma, 1)
    print(f"  factor={factor:5}: predicted max_h = {pred.max_h}")
print("(observed recoveries run up to ~2x past this prediction)")

print("\ncombinatorial kick-out: drop k coordinates, hoping they are zeros")
n, h = 256, 8
print(f"{'k':>5} {'p(all zero)':>12} {'expected cost mult':>20}")
for k in (0, 16, 64, 128):
    p = kickout_probability(n, h, k)
    mult = math.inf if p == 0 else 1 / p
    print(f"{k:>5} {p:>12.4f} {mult:>20.1f}")
