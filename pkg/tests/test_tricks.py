import numpy as np
import pytest

from lwelab.analysis import nomod
from lwelab.core import (
    LweParams,
    SampleKind,
    SecretDist,
    center,
    gen_samples,
    residuals,
    sample_secret,
    save_samples,
    verify_secret,
)
from lwelab.tricks import (
    Permutation,
    dimension_reduce,
    hamming_reduce,
    hamming_secret,
    permute_instance,
    permuted_secret,
    random_permutation,
    reduced_secret,
    restore_permuted_secret,
)

PARAMS = LweParams(n=20, q=3329, sigma_e=2.0)


def _instance(h=4, seed=0, dist=SecretDist.BINARY):
    secret = sample_secret(PARAMS, dist, h, seed=seed)
    originals = gen_samples(PARAMS, secret, seed=seed + 100)
    return secret, originals


# ---------------------------------------------------------------- permutation

def test_permutation_validation_and_inverse():
    with pytest.raises(ValueError):
        Permutation(np.array([0, 0, 1]))
    pi = random_permutation(10, seed=1)
    assert np.array_equal(pi.inverse().pi[pi.pi], np.arange(10))
    v = np.arange(10) * 7
    assert np.array_equal(pi.inverse().apply(pi.apply(v)), v)


def test_identity_permutation_is_noop(tmp_path):
    secret, originals = _instance(seed=1)
    ident = Permutation(np.arange(PARAMS.n))
    permuted, _ = permute_instance(originals, ident)
    a_path, b_path = tmp_path / "a.txt", tmp_path / "b.txt"
    save_samples(originals, a_path)
    save_samples(permuted, b_path)
    assert a_path.read_text() == b_path.read_text()


def test_permutation_roundtrip_byte_identical(tmp_path):
    secret, originals = _instance(seed=2)
    pi = random_permutation(PARAMS.n, seed=3)
    permuted, _ = permute_instance(originals, pi)
    restored, _ = permute_instance(permuted, pi.inverse())
    a_path, b_path = tmp_path / "a.txt", tmp_path / "b.txt"
    save_samples(originals, a_path)
    save_samples(restored, b_path)
    assert a_path.read_text() == b_path.read_text()


def test_permuted_instance_has_permuted_secret():
    secret, originals = _instance(seed=4)
    permuted, pi = permute_instance(originals, seed=5)
    sec_p = permuted_secret(secret, pi)
    # b is unchanged and the permuted secret explains it exactly
    assert np.array_equal(permuted.b, originals.b)
    assert np.array_equal(residuals(sec_p, permuted), residuals(secret, originals))
    assert verify_secret(sec_p, permuted).accepted
    # bookkeeping inverts exactly
    assert np.array_equal(restore_permuted_secret(sec_p, pi).entries, secret.entries)


def test_permutation_preserves_unreduced_nomod_exactly():
    secret, originals = _instance(seed=6, dist=SecretDist.TERNARY)
    permuted, pi = permute_instance(originals, seed=7)
    assert (
        nomod(originals, secret).percentage
        == nomod(permuted, permuted_secret(secret, pi)).percentage
    )


def test_permute_requires_original_kind():
    secret, originals = _instance(seed=8)
    held = gen_samples(PARAMS, secret, count=16, seed=9, kind=SampleKind.HELD_OUT)
    with pytest.raises(ValueError):
        permute_instance(held)


# ---------------------------------------------------------------- dimension reduction

def test_dimension_reduce_zero_coordinates_preserves_residuals():
    secret, originals = _instance(h=3, seed=10)
    zeros = np.flatnonzero(secret.entries == 0)[:8]
    smaller = dimension_reduce(originals, zeros)
    sec_small, valid = reduced_secret(secret, zeros)
    assert valid
    assert smaller.params.n == PARAMS.n - 8
    assert np.array_equal(residuals(sec_small, smaller), residuals(secret, originals))
    assert verify_secret(sec_small, smaller).accepted


def test_dimension_reduce_dropping_nonzero_breaks_instance():
    secret, originals = _instance(h=3, seed=11)
    drop = [int(secret.support[0])]
    smaller = dimension_reduce(originals, drop)
    sec_small, valid = reduced_secret(secret, drop)
    assert not valid
    report = verify_secret(sec_small, smaller)
    assert not report.accepted
    assert report.frac_small < 0.8  # residuals turn uniform-like


def test_dimension_reduce_validates_indices():
    _, originals = _instance(seed=12)
    with pytest.raises(ValueError):
        dimension_reduce(originals, [PARAMS.n])


# ---------------------------------------------------------------- hamming reduction

def test_hamming_identity_exhaustive_small_n():
    # a'.s' - b' == a.s - b (mod q) for every binary s and every flip set S
    q = 97
    rng = np.random.default_rng(13)
    for n in range(1, 11):
        a = rng.integers(0, q, size=(3, n), dtype=np.int64)
        secrets = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.int64)
        dots = a @ secrets.T % q  # (3, 2^n) a.s for every secret
        for smask in range(2**n):
            flip = np.flatnonzero((smask >> np.arange(n)) & 1)
            a_flip = a.copy()
            a_flip[:, flip] = (-a_flip[:, flip]) % q
            shift = a[:, flip].sum(axis=1) % q
            s_flip = secrets.copy()
            s_flip[:, flip] = 1 - s_flip[:, flip]
            # compare a'.s' with a.s - sum_S a for all 2^n secrets at once
            lhs = a_flip @ s_flip.T % q
            rhs = (dots - shift[:, None]) % q
            assert np.array_equal(lhs, rhs)


def test_hamming_reduce_matches_secret_map():
    secret, originals = _instance(h=5, seed=14)
    rng = np.random.default_rng(15)
    flip = rng.choice(PARAMS.n, size=6, replace=False)
    flipped = hamming_reduce(originals, flip, SecretDist.BINARY)
    sec_f = hamming_secret(secret, flip)
    assert np.array_equal(residuals(sec_f, flipped), residuals(secret, originals))
    assert verify_secret(sec_f, flipped).accepted


def test_hamming_reduce_empty_set_is_identity(tmp_path):
    secret, originals = _instance(seed=16)
    out = hamming_reduce(originals, [])
    a_path, b_path = tmp_path / "a.txt", tmp_path / "b.txt"
    save_samples(originals, a_path)
    save_samples(out, b_path)
    assert a_path.read_text() == b_path.read_text()


def test_hamming_reduce_on_true_support_zeroes_secret():
    secret, originals = _instance(h=4, seed=17)
    flipped = hamming_reduce(originals, secret.support, SecretDist.BINARY)
    sec_f = hamming_secret(secret, secret.support)
    assert sec_f.h == 0
    # b' = e (mod q): the instance reduces to pure noise
    assert np.array_equal(
        center(flipped.b, PARAMS.q), center(originals.errors, PARAMS.q)
    )


def test_hamming_reduce_self_inverse():
    secret, originals = _instance(h=4, seed=18)
    flip = [1, 5, 7, 13]
    twice = hamming_reduce(hamming_reduce(originals, flip), flip)
    assert np.array_equal(twice.a, originals.a)
    assert np.array_equal(twice.b, originals.b)


def test_hamming_reduce_warns_for_non_binary():
    secret, originals = _instance(h=3, seed=19, dist=SecretDist.TERNARY)
    with pytest.warns(UserWarning):
        hamming_reduce(originals, [0, 1], SecretDist.TERNARY)
    with pytest.raises(ValueError):
        hamming_secret(secret, [0, 1])
