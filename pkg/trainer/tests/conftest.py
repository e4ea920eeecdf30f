import numpy as np
import pytest


def make_lwe_data(n, q, h, sigma, count, seed, support=None):
    """Self-contained LWE generator (the trainer never imports the attack lab)."""
    rng = np.random.default_rng(seed)
    secret = np.zeros(n, dtype=np.int64)
    idx = support if support is not None else rng.choice(n, size=h, replace=False)
    secret[idx] = 1
    a = rng.integers(0, q, size=(count, n), dtype=np.int64)
    e = np.rint(rng.normal(0, sigma, count)).astype(np.int64)
    b = (a @ secret + e) % q
    return secret, a, b


def write_token_file(path, a, b, q, B, r):
    with open(path, "w") as fh:
        fh.write(f"q={q} B={B} r={r} n={a.shape[1]}\n")
        for row, target in zip(a, b):
            tokens = []
            for v in row:
                tokens += [v // B, (v % B) // r]
            tokens += [target // B, (target % B) // r]
            fh.write(" ".join(str(int(t)) for t in tokens) + "\n")


def write_sample_file(path, a, b, q, sigma, kind, seed):
    with open(path, "w") as fh:
        fh.write(
            f"n={a.shape[1]} q={q} sigma_e={sigma:g} kind={kind} "
            f"seed={seed} count={len(a)}\n"
        )
        for row, target in zip(a, b):
            fh.write(" ".join(str(int(v)) for v in row) + f" {int(target)}\n")


@pytest.fixture
def toy_tokens(tmp_path):
    """Small n=16, q=251, h=1 token file plus the ground truth."""
    n, q, B, r = 16, 251, 32, 1
    secret, a, b = make_lwe_data(n, q, 1, 1.0, 2000, seed=0, support=[5])
    path = tmp_path / "tokens.txt"
    write_token_file(path, a, b, q, B, r)
    return {"path": path, "secret": secret, "n": n, "q": q, "B": B, "r": r}
