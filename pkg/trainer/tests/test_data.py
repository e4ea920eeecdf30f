import numpy as np
import pytest

from lwetrainer.data import decode_tokens, encode_values, load_token_file

from conftest import make_lwe_data, write_token_file


def test_load_token_file_shapes(toy_tokens):
    data = load_token_file(toy_tokens["path"])
    assert data.q == 251 and data.B == 32 and data.r == 1 and data.n == 16
    assert data.n_hi == 8 and data.n_lo == 32
    assert data.vocab_size == 40
    assert data.inputs.shape == (2000, 32)
    assert data.targets.shape == (2000, 2)
    # lo tokens are shifted into [n_hi, vocab)
    assert int(data.inputs[:, 1::2].min()) >= data.n_hi
    assert int(data.inputs.max()) < data.vocab_size
    assert int(data.targets[:, 0].max()) < data.n_hi


def test_encode_decode_are_inverse_up_to_bucket():
    q, B, r = 842779, 105348, 64
    rng = np.random.default_rng(1)
    values = rng.integers(0, q, size=500)
    tokens = encode_values(values, q, B, r)
    n_hi = (q - 1) // B + 1
    back = decode_tokens(tokens[..., 0::2], tokens[..., 1::2] - n_hi, q, B, r)
    assert (np.abs(back.ravel() - values) < r).all()
    assert (back < q).all()


def test_vocabulary_overflow_is_a_config_error(tmp_path):
    secret, a, b = make_lwe_data(4, 100_003, 1, 1.0, 5, seed=2)
    path = tmp_path / "big.txt"
    write_token_file(path, a, b, 100_003, 12501, 1)  # 12501 lo tokens
    with pytest.raises(ValueError, match="vocabulary"):
        load_token_file(path)


def test_token_count_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("q=251 B=32 r=1 n=4\n1 2 3\n")
    with pytest.raises(ValueError):
        load_token_file(path)
