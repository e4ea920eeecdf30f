import numpy as np
import pytest

from lwelab.core import (
    LweParams,
    Secret,
    SecretDist,
    gen_samples,
    sample_secret,
    verify_secret,
)
from lwelab.usvp import UsvpConfig, build_usvp_basis, usvp_attack


def test_basis_layout_rearranged():
    a = np.arange(6).reshape(2, 3) % 5
    basis = build_usvp_basis(a, b=np.array([1, 2]), q=5, m_factor=3)
    assert basis.shape == (6, 6)
    m, n = 2, 3
    assert np.array_equal(basis[:m, :m], 5 * np.eye(m, dtype=np.int64))
    assert np.array_equal(basis[m : m + n, :m], a.T)
    assert np.array_equal(basis[m : m + n, m : m + n], np.eye(n, dtype=np.int64))
    assert basis[-1, :m].tolist() == [1, 2]
    assert basis[-1, -1] == 3


def test_embedding_contains_short_secret_vector():
    params = LweParams(n=10, q=521, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=0)
    samples = gen_samples(params, secret, count=10, seed=1)
    a, b, e = samples.a, samples.b, samples.errors
    basis = build_usvp_basis(a, b, params.q, m_factor=1)
    # coefficients: q-row multipliers -k, then the secret, then -1 for the b row
    k = (a @ secret.entries + e - b) // params.q
    coeffs = np.concatenate([-k, secret.entries, [-1]])
    v = coeffs @ basis
    assert np.array_equal(v[:10], -e)
    assert np.array_equal(v[10:20], secret.entries)
    assert v[-1] == -1
    bound = np.sqrt(
        secret.h * np.abs(secret.entries).max() ** 2 + (e**2).sum() + 1
    )
    assert np.linalg.norm(v) <= bound + 1e-9


def test_usvp_recovers_small_binary_secret():
    params = LweParams(n=16, q=521, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=2)
    originals = gen_samples(params, secret, seed=3)
    result = usvp_attack(originals, UsvpConfig(blocksize=16, max_loops=10))
    assert result.secret is not None
    assert np.array_equal(result.secret.entries, secret.entries)
    assert result.report.accepted  # never returned unverified
    assert verify_secret(result.secret, originals).accepted


def test_usvp_zero_secret_trivial_accept():
    params = LweParams(n=12, q=521, sigma_e=1.0)
    zero = Secret(SecretDist.BINARY, np.zeros(12, dtype=int))
    originals = gen_samples(params, zero, seed=4)
    result = usvp_attack(originals, UsvpConfig(blocksize=8, max_loops=5))
    assert result.secret is not None
    assert result.secret.h == 0
    assert result.report.accepted


def test_usvp_ternary_and_unrearranged_variant():
    params = LweParams(n=12, q=521, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.TERNARY, 2, seed=5)
    originals = gen_samples(params, secret, seed=6)
    for rearranged in (True, False):
        cfg = UsvpConfig(blocksize=12, max_loops=8, rearranged=rearranged)
        result = usvp_attack(originals, cfg)
        assert result.secret is not None
        assert np.array_equal(result.secret.entries, secret.entries)


def test_usvp_budget_exhaustion_reports_failure():
    params = LweParams(n=24, q=3329, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.BINARY, 8, seed=7)
    originals = gen_samples(params, secret, seed=8)
    # one weak loop at tiny blocksize: not enough reduction for this instance
    result = usvp_attack(originals, UsvpConfig(blocksize=2, max_loops=1))
    if result.secret is None:
        assert result.loops_used == 1
        assert result.best_norm > 0
    else:  # if it does crack it, the result must still verify
        assert result.report.accepted


def test_usvp_metrics_sidecar(tmp_path):
    params = LweParams(n=10, q=521, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 1, seed=9)
    originals = gen_samples(params, secret, seed=10)
    path = tmp_path / "metrics.csv"
    usvp_attack(originals, UsvpConfig(blocksize=8, max_loops=3), metrics_path=path)
    lines = path.read_text().splitlines()
    assert lines[0] == "matrix,tours,factor,wall_seconds"


def test_usvp_requires_enough_samples():
    params = LweParams(n=16, q=521, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=11)
    short = gen_samples(params, secret, count=8, seed=12)
    with pytest.raises(ValueError):
        usvp_attack(short)


def test_usvp_config_validation():
    with pytest.raises(ValueError):
        UsvpConfig(blocksize=1)
    with pytest.raises(ValueError):
        UsvpConfig(blocksize=30)
    with pytest.raises(ValueError):
        UsvpConfig(embedding_factor=0)
