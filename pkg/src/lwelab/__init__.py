"""lwelab: a desk-scale laboratory for ML-style attacks on LWE."""

from .core import (
    GAUSSIAN_SECRET_STD,
    LweParams,
    LweSample,
    SampleKind,
    SampleSet,
    Secret,
    SecretDist,
    VerifyReport,
    center,
    gen_samples,
    load_samples,
    residuals,
    sample_secret,
    save_samples,
    verify_secret,
)

from .analysis import (
    NoModReport,
    ScalingPrediction,
    kickout_probability,
    nomod,
    scaling_predict,
)
from .oracles import CheatingOracle, FileOracle, InDistributionOracle
from .recovery import (
    RecoveryResult,
    RecoveryStatus,
    emd_distinguisher_scores,
    one_bit_scores,
    recover,
    two_bit_classes,
)
from .reduction import (
    ReductionConfig,
    assemble_matrices,
    build_training_set,
    reduce_matrix,
    reduction_factor,
)
from .tokens import TokenScheme, decode, encode, export_dataset
from .tricks import (
    Permutation,
    dimension_reduce,
    hamming_reduce,
    permute_instance,
    random_permutation,
)
from .usvp import UsvpConfig, usvp_attack

__all__ = [
    "GAUSSIAN_SECRET_STD",
    "LweParams",
    "LweSample",
    "SampleKind",
    "SampleSet",
    "Secret",
    "SecretDist",
    "VerifyReport",
    "center",
    "gen_samples",
    "load_samples",
    "residuals",
    "sample_secret",
    "save_samples",
    "verify_secret",
    "NoModReport",
    "ScalingPrediction",
    "kickout_probability",
    "nomod",
    "scaling_predict",
    "CheatingOracle",
    "FileOracle",
    "InDistributionOracle",
    "RecoveryResult",
    "RecoveryStatus",
    "one_bit_scores",
    "emd_distinguisher_scores",
    "two_bit_classes",
    "recover",
    "ReductionConfig",
    "assemble_matrices",
    "reduce_matrix",
    "build_training_set",
    "reduction_factor",
    "TokenScheme",
    "encode",
    "decode",
    "export_dataset",
    "Permutation",
    "random_permutation",
    "permute_instance",
    "dimension_reduce",
    "hamming_reduce",
    "UsvpConfig",
    "usvp_attack",
]

__version__ = "0.1.0"
