import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lwelab.core import (
    LweParams,
    SampleKind,
    SampleSet,
    Secret,
    SecretDist,
    center,
    gen_samples,
    load_samples,
    residuals,
    sample_secret,
    save_samples,
    verify_secret,
)


# ---------------------------------------------------------------- center

def test_center_trivial_examples():
    assert center(0, 11) == 0
    assert center(6, 11) == -5  # just above q/2
    q = 842779
    assert center(q - 1, q) == -1


def test_center_exhaustive_small_moduli():
    for q in (2, 3, 4, 5, 11, 64, 101, 1000):
        v = np.arange(-2 * q, 3 * q)
        c = center(v, q)
        assert ((c > -q / 2) & (c <= q / 2)).all()
        assert (np.mod(c - v, q) == 0).all()


@given(st.integers(-(2**62), 2**62), st.integers(2, 2**41))
@settings(max_examples=300, deadline=None)
def test_center_congruence_property(v, q):
    c = center(v, q)
    assert -q / 2 < c <= q / 2
    assert (c - v) % q == 0


def test_center_array_matches_scalar():
    q = 101
    v = np.arange(-q, 2 * q)
    assert (center(v, q) == np.array([center(int(x), q) for x in v])).all()


# ---------------------------------------------------------------- params / secrets

def test_params_validation():
    with pytest.raises(ValueError):
        LweParams(n=0, q=11)
    with pytest.raises(ValueError):
        LweParams(n=4, q=1)
    with pytest.raises(ValueError):
        LweParams(n=4, q=11, sigma_e=1.0)  # sigma_e >= q/16
    with pytest.raises(ValueError):
        LweParams(n=4, q=2**63)


def test_sample_secret_saturated_binary():
    params = LweParams(n=4, q=97, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 4, seed=0)
    assert secret.entries.tolist() == [1, 1, 1, 1]
    assert secret.h == 4


def test_sample_secret_ternary_paper_shape():
    params = LweParams(n=256, q=842779, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.TERNARY, 20, seed=3)
    assert secret.h == 20
    nonzero = secret.entries[secret.entries != 0]
    assert set(nonzero.tolist()) <= {-1, 1}
    assert len(nonzero) == 20


def test_sample_secret_ternary_signs_balanced():
    params = LweParams(n=64, q=3329, sigma_e=3.0)
    plus = 0
    total = 0
    for seed in range(200):
        s = sample_secret(params, SecretDist.TERNARY, 8, seed=seed)
        plus += int((s.entries == 1).sum())
        total += 8
    # equiprobable signs: binomial(1600, 1/2), 5 sigma band
    assert abs(plus - total / 2) < 5 * np.sqrt(total / 4)


def test_sample_secret_gaussian_chi2_matches_rounded_normal():
    # oracle: P(round(N(0,9)) = k | nonzero), tails folded into the end bins
    params = LweParams(n=8, q=3329, sigma_e=3.0)
    draws = []
    for seed in range(34_000):
        s = sample_secret(params, SecretDist.GAUSSIAN, 3, seed=seed)
        draws.extend(s.entries[s.entries != 0].tolist())
    draws = np.asarray(draws)
    assert len(draws) == 3 * 34_000
    lim = 8
    edges = np.arange(-lim, lim + 1)
    probs = []
    for k in edges:
        lo, hi = k - 0.5, k + 0.5
        if k == -lim:
            lo = -np.inf
        if k == lim:
            hi = np.inf
        probs.append(stats.norm.cdf(hi, scale=3) - stats.norm.cdf(lo, scale=3))
    probs = np.array(probs)
    probs[edges == 0] = 0.0  # resampled until nonzero
    probs /= probs.sum()
    clipped = np.clip(draws, -lim, lim)
    counts = np.array([(clipped == k).sum() for k in edges], dtype=float)
    keep = probs > 0
    _, p = stats.chisquare(counts[keep], probs[keep] * len(draws))
    assert p > 0.01


def test_sample_secret_rejects_degenerate_h():
    params = LweParams(n=8, q=97, sigma_e=1.0)
    with pytest.raises(ValueError):
        sample_secret(params, SecretDist.BINARY, 0, seed=0)
    with pytest.raises(ValueError):
        sample_secret(params, SecretDist.BINARY, 9, seed=0)


def test_secret_family_validation():
    with pytest.raises(ValueError):
        Secret(SecretDist.BINARY, np.array([0, 2, 1]))
    with pytest.raises(ValueError):
        Secret(SecretDist.TERNARY, np.array([0, -2, 1]))
    with pytest.raises(ValueError):
        Secret(SecretDist.GAUSSIAN, np.array([0, 19, 1]))
    all_zero = Secret(SecretDist.BINARY, np.zeros(5, dtype=int))
    assert all_zero.h == 0  # constructible, but sample_secret never makes one


# ---------------------------------------------------------------- gen_samples

def test_gen_samples_noiseless_unit_secret():
    params = LweParams(n=6, q=10_007, sigma_e=0.0)
    entries = np.zeros(6, dtype=np.int64)
    entries[0] = 1
    secret = Secret(SecretDist.BINARY, entries)
    samples = gen_samples(params, secret, count=200, seed=1)
    assert (samples.b == samples.a[:, 0]).all()


def test_gen_samples_paper_row_shape():
    params = LweParams(n=256, q=842779, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.BINARY, 5, seed=2)
    samples = gen_samples(params, secret, count=1024, seed=3)
    assert samples.a.shape == (1024, 256)
    assert samples.a.min() >= 0 and samples.a.max() < params.q
    assert samples.b.min() >= 0 and samples.b.max() < params.q


def test_gen_samples_default_count_is_4n():
    params = LweParams(n=20, q=997, sigma_e=2.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=4)
    assert len(gen_samples(params, secret, seed=5)) == 80


def test_centered_residual_equals_minus_error():
    params = LweParams(n=16, q=7817, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.TERNARY, 5, seed=6)
    samples = gen_samples(params, secret, count=500, seed=7)
    assert np.array_equal(residuals(secret, samples), -samples.errors)


def test_gen_samples_reproducible_bytes(tmp_path):
    params = LweParams(n=12, q=3329, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.BINARY, 3, seed=8)
    texts = []
    for run in range(2):
        samples = gen_samples(params, secret, count=64, seed=9)
        path = tmp_path / f"run{run}.txt"
        save_samples(samples, path)
        texts.append(path.read_text())
    assert texts[0] == texts[1]


# ---------------------------------------------------------------- verify_secret

def test_verify_accepts_true_secret():
    params = LweParams(n=32, q=3329, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.BINARY, 4, seed=10)
    originals = gen_samples(params, secret, seed=11)
    report = verify_secret(secret, originals)
    assert report.accepted
    assert report.residual_std == pytest.approx(3.0, abs=1.0)


def test_verify_rejects_uniform_wrong_guess():
    params = LweParams(n=32, q=3329, sigma_e=3.0)
    secret = sample_secret(params, SecretDist.BINARY, 4, seed=12)
    originals = gen_samples(params, secret, seed=13)
    wrong = sample_secret(params, SecretDist.TERNARY, 16, seed=999)
    report = verify_secret(wrong, originals)
    assert not report.accepted
    assert report.frac_small == pytest.approx(0.5, abs=0.2)


def test_verify_rejects_zero_guess():
    params = LweParams(n=24, q=3329, sigma_e=2.0)
    zero = Secret(SecretDist.BINARY, np.zeros(24, dtype=int))
    accepts = 0
    for seed in range(100):
        secret = sample_secret(params, SecretDist.BINARY, 3, seed=seed)
        originals = gen_samples(params, secret, count=96, seed=seed + 1000)
        accepts += verify_secret(zero, originals).accepted
    assert accepts == 0


def test_verify_empty_set_rejected():
    params = LweParams(n=4, q=97, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 1, seed=0)
    empty = SampleSet(params, np.zeros((0, 4)), np.zeros(0), SampleKind.ORIGINAL, 0)
    with pytest.raises(ValueError):
        verify_secret(secret, empty)


# ---------------------------------------------------------------- file format

def test_sample_file_roundtrip(tmp_path):
    params = LweParams(n=10, q=1021, sigma_e=2.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=14)
    samples = gen_samples(params, secret, count=32, seed=15)
    path = tmp_path / "samples.txt"
    save_samples(samples, path)
    text = path.read_text()
    assert text.splitlines()[0] == "n=10 q=1021 sigma_e=2 kind=original seed=15 count=32"
    assert not any(line != line.rstrip() for line in text.splitlines())
    loaded = load_samples(path)
    assert np.array_equal(loaded.a, samples.a)
    assert np.array_equal(loaded.b, samples.b)
    assert loaded.kind is SampleKind.ORIGINAL
    assert loaded.params == params
    # and saving again is byte-identical
    path2 = tmp_path / "again.txt"
    save_samples(loaded, path2)
    assert path2.read_text() == text


def test_sample_file_rejects_bad_counts(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("n=3 q=11 sigma_e=1 kind=original seed=0 count=2\n1 2 3 4\n")
    with pytest.raises(ValueError):
        load_samples(path)
