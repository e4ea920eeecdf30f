import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwelab.core import LweParams, SecretDist, gen_samples, sample_secret
from lwelab.tokens import TokenScheme, decode, encode, export_dataset, read_token_header


def test_default_base_follows_modulus_size():
    assert TokenScheme.for_modulus(3329).B == 417          # ceil(3329/8)
    assert TokenScheme.for_modulus(3329).r == 1
    assert TokenScheme.for_modulus(842779).B == 105348     # ceil(842779/8)
    assert TokenScheme.for_modulus(2199023255531).B == 137438953471  # ceil(q/16), 41-bit q
    assert TokenScheme.for_modulus(2199023255531).lo_vocab <= 2000


def test_encode_trivial_origin():
    scheme = TokenScheme(q=3329, B=417, r=1)
    assert encode(0, scheme) == (0, 0)
    assert scheme.vocab_size == 417 + 8  # 8 hi digits


def test_encode_largest_value_big_modulus():
    # 842778 = 7*105348 + 105342; 105342 = 64*1645 + 62
    scheme = TokenScheme(q=842779, B=105348, r=64)
    assert encode(842778, scheme) == (7, 1645)
    assert abs(842778 - decode(7, 1645, scheme)) < 64


def test_roundtrip_exhaustive_q3329():
    scheme = TokenScheme(q=3329, B=417, r=1)
    v = np.arange(3329)
    hi, lo = encode(v, scheme)
    assert np.array_equal(decode(hi, lo, scheme), v)  # r=1 is lossless
    assert hi.max() < 8


def test_roundtrip_sampled_big_modulus():
    scheme = TokenScheme(q=842779, B=105348, r=64)
    rng = np.random.default_rng(0)
    v = rng.integers(0, scheme.q, size=20_000)
    hi, lo = encode(v, scheme)
    err = np.abs(v - decode(hi, lo, scheme))
    assert err.max() < 64
    assert hi.max() < 8
    assert lo.max() < scheme.lo_vocab <= 2000


@given(st.integers(2, 2**41))
@settings(max_examples=200, deadline=None)
def test_default_scheme_hi_token_bound(q):
    scheme = TokenScheme.for_modulus(q)
    hi, _ = encode(q - 1, scheme)
    assert hi < (16 if math.log2(q) > 30 else 8)
    assert scheme.lo_vocab <= 2000


def test_vocab_bound_enforced():
    with pytest.raises(ValueError):
        TokenScheme(q=842779, B=105348, r=1)  # 105348 lo tokens
    with pytest.raises(ValueError):
        TokenScheme(q=100, B=50, r=60)  # r > B


def test_encode_range_validation():
    scheme = TokenScheme(q=3329, B=417, r=1)
    with pytest.raises(ValueError):
        encode(3329, scheme)
    with pytest.raises(ValueError):
        encode(-1, scheme)


def test_table_row_vocabularies():
    # every preset tokenization keeps ceil(B/r) within the 2000-token bound
    from lwelab.presets import PRESETS

    for bundle in PRESETS.values():
        scheme = TokenScheme(q=bundle.q, B=bundle.base, r=bundle.bucket)
        assert scheme.lo_vocab <= 2000


def test_export_dataset_layout(tmp_path):
    params = LweParams(n=5, q=3329, sigma_e=2.0)
    secret = sample_secret(params, SecretDist.BINARY, 2, seed=0)
    samples = gen_samples(params, secret, count=7, seed=1)
    scheme = TokenScheme(q=3329, B=417, r=1)
    path = tmp_path / "tokens.txt"
    export_dataset(samples, scheme, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "q=3329 B=417 r=1 n=5"
    assert len(lines) == 8
    row = np.array(lines[1].split(), dtype=np.int64)
    assert len(row) == 2 * 5 + 2
    hi, lo = encode(samples.a[0], scheme)
    assert np.array_equal(row[0:10:2], hi)
    assert np.array_equal(row[1:10:2], lo)
    assert decode(row[-2], row[-1], scheme) == samples.b[0]
    header = read_token_header(path)
    assert header == {"q": 3329, "B": 417, "r": 1, "n": 5}


def test_export_dataset_modulus_mismatch(tmp_path):
    params = LweParams(n=4, q=1021, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 1, seed=0)
    samples = gen_samples(params, secret, count=4, seed=1)
    with pytest.raises(ValueError):
        export_dataset(samples, TokenScheme(q=3329, B=417, r=1), tmp_path / "x.txt")
