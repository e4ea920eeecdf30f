"""lwetrainer: toy sequence models serving the oracle file protocol."""

from .data import TokenFile, decode_tokens, encode_values, load_token_file
from .losses import emd_1d, squared_emd_loss
from .models import EncoderOnly, ModelConfig, RotaryWordRotation, Seq2Seq, build_model
from .serve import answer_request, serve_oracle
from .train import load_checkpoint, save_checkpoint, train

__all__ = [
    "TokenFile",
    "load_token_file",
    "encode_values",
    "decode_tokens",
    "emd_1d",
    "squared_emd_loss",
    "ModelConfig",
    "EncoderOnly",
    "Seq2Seq",
    "RotaryWordRotation",
    "build_model",
    "train",
    "save_checkpoint",
    "load_checkpoint",
    "serve_oracle",
    "answer_request",
]

__version__ = "0.1.0"
