import pytest

from lwelab.core import LweParams, SecretDist, gen_samples, sample_secret
from lwelab.reduction import ReductionConfig, assemble_matrices, reduce_matrix


@pytest.fixture(scope="session")
def reduced_n32():
    """One fully reduced n=32 instance, shared by reduction and acceptance tests.

    Returns (params, secret, originals, config, outputs) where outputs is a
    list of ReductionOutput for two independent matrices.
    """
    params = LweParams(n=32, q=1021, sigma_e=1.0)
    secret = sample_secret(params, SecretDist.BINARY, 3, seed=11)
    originals = gen_samples(params, secret, seed=12)
    cfg = ReductionConfig(omega=10, beta1=6, beta2=8, delta1=0.96, delta2=0.99,
                          max_tours=10)
    blocks = assemble_matrices(originals, cfg, 2, seed=13)
    outputs = [reduce_matrix(block, cfg) for block in blocks]
    return params, secret, originals, cfg, outputs
