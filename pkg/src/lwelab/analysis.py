"""Training-data analytics: NoMod percentage, the recoverability scaling law,
and the combinatorial kick-out cost estimator.

NoMod asks, per sample: with every coordinate of a and b centered into
(-q/2, q/2], does a.s - b computed over the plain integers stay inside
(-q/2, q/2)?  If yes, b was computable from a without a modular wrap for
this secret.  Empirically, recovery succeeds once the percentage of such
samples clears about 67%, and a Gaussian model of x = a.s - b turns that
threshold into the closed-form law sigma_x ~ sqrt(h) * sigma_a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LweParams, SampleSet, Secret, center

__all__ = [
    "NoModReport",
    "ScalingPrediction",
    "nomod",
    "nomod_gaussian_estimate",
    "scaling_predict",
    "kickout_probability",
    "kickout_expected_cost",
]

NOMOD_RECOVERY_THRESHOLD = 67.0


@dataclass(frozen=True)
class NoModReport:
    percentage: float
    sample_count: int
    threshold_hit: bool


@dataclass(frozen=True)
class ScalingPrediction:
    sigma_a: float
    sigma_x: float
    max_h: int
    recoverable: bool


def nomod(samples: SampleSet, secret: Secret) -> NoModReport:
    """Percentage of samples computable without a modular wrap.

    Requires the true secret, so this is a lab diagnostic, not attack
    machinery.
    """
    if secret.n != samples.params.n:
        raise ValueError("secret dimension does not match sample set")
    q = samples.params.q
    a_c = center(samples.a, q).astype(np.float64)
    b_c = center(samples.b, q).astype(np.float64)
    x = a_c @ secret.entries.astype(np.float64) - b_c
    pct = 100.0 * float(np.mean(np.abs(x) < q / 2))
    return NoModReport(
        percentage=pct,
        sample_count=len(samples),
        threshold_hit=pct >= NOMOD_RECOVERY_THRESHOLD,
    )


def nomod_gaussian_estimate(q: int, h: int) -> float:
    """Gaussian-model NoMod for h-sparse, unit-entry secrets on uniform data.

    x is modelled as Normal(0, h * (q/sqrt(12))^2); the estimate is
    100 * (2 Phi(q / (2 sigma_x)) - 1).  Used as an independent cross-check
    of the empirical percentage.
    """
    sigma_x = math.sqrt(h) * q / math.sqrt(12.0)
    z = (q / 2) / sigma_x
    return 100.0 * math.erf(z / math.sqrt(2.0))


def scaling_predict(params: LweParams, sigma_a: float, h: int) -> ScalingPrediction:
    """Recoverability prediction from the entry stddev of the training data.

    sigma_x = sqrt(h) * sigma_a + sigma_e; the secret is predicted
    recoverable when sigma_x <= q/2, and the largest recoverable h for this
    sigma_a is floor((q / (2 sigma_a))^2) (sigma_e dropped, as it is
    dominated).
    """
    if sigma_a <= 0:
        raise ValueError("sigma_a must be positive")
    if h < 0:
        raise ValueError("h must be nonnegative")
    sigma_x = math.sqrt(h) * sigma_a + params.sigma_e
    ratio = (params.q / (2.0 * sigma_a)) ** 2
    # epsilon floor: sigma_a = q/sqrt(12) must yield exactly 3, not floor(2.99...)
    return ScalingPrediction(
        sigma_a=sigma_a,
        sigma_x=sigma_x,
        max_h=math.floor(ratio * (1 + 1e-12) + 1e-9),
        recoverable=sigma_x <= params.q / 2,
    )


def kickout_probability(n: int, h: int, k: int) -> float:
    """Probability that k uniformly guessed-zero coordinates are all zero.

    p = ((n - h) / n)^k for an h-sparse secret of dimension n.
    """
    if not 0 < n:
        raise ValueError("n must be positive")
    if not 0 <= h <= n:
        raise ValueError("h must lie in [0, n]")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1.0
    if h == n:
        return 0.0  # no zeros exist, any kick-out is certain to fail
    if k > n - h:
        raise ValueError(f"cannot kick out {k} zeros, only {n - h} exist")
    return float(((n - h) / n) ** k)


def kickout_expected_cost(base_cost: float, n: int, h: int, k: int) -> float:
    """Expected total cost of the guess-and-retry loop: base_cost / p."""
    p = kickout_probability(n, h, k)
    if p == 0.0:
        return math.inf
    return base_cost / p
