"""Two toy-scale architectures for predicting b from tokenized a.

Seq2Seq: a 1-layer encoder and a deeper decoder whose tail layers share
weights (a universal transformer); iteration through the shared stack is
modulated by a copy gate, so each pass can overwrite or keep the state.

EncoderOnly: a BERT-style encoder with rotary *word* embeddings: queries and
keys are rotated by angles proportional to the decoded coordinate value,
with integer frequencies, so the rotation is exactly periodic in the value
modulo q and the embedding respects the modular wrap.  Two classification
heads predict the hi digit and lo bucket of b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

__all__ = ["ModelConfig", "Seq2Seq", "EncoderOnly", "build_model", "RotaryWordRotation"]


@dataclass
class ModelConfig:
    arch: str = "encoder"  # "encoder" | "seq2seq"
    dim: int = 64
    heads: int = 4
    encoder_layers: int = 1
    decoder_layers: int = 3   # seq2seq: first unshared, rest share weights
    shared_layers: int = 2
    encoder_only_layers: int = 2
    ffn_mult: int = 4
    copy_gate_bias: float = 1.0  # >0 biases the gate toward taking the update
    emd_weight: float = 1.0
    lr: float = 1e-5
    warmup_frac: float = 0.01
    seed: int = 0

    # paper-scale presets, loadable but far beyond toy budgets
    @classmethod
    def seq2seq_full(cls) -> "ModelConfig":
        return cls(arch="seq2seq", dim=512, heads=4, encoder_layers=1,
                   decoder_layers=9, shared_layers=8)

    @classmethod
    def encoder_full(cls) -> "ModelConfig":
        return cls(arch="encoder", dim=512, heads=4, encoder_only_layers=4)

    def __post_init__(self) -> None:
        if self.dim % self.heads:
            raise ValueError("width must be divisible by the head count")
        if self.shared_layers >= self.decoder_layers + 1:
            raise ValueError("shared layers must fit inside the decoder stack")


class RotaryWordRotation(nn.Module):
    """Value-driven rotary rotation: angle_k(v) = 2 pi f_k v / q, f_k integer.

    Integer frequencies make angle(v + m q) and angle(v) the same rotation
    for every integer m, so wrapped values embed identically.
    """

    def __init__(self, head_dim: int, q: int):
        super().__init__()
        if head_dim % 2:
            raise ValueError("head dimension must be even for rotations")
        self.q = q
        freqs = torch.arange(1, head_dim // 2 + 1, dtype=torch.float64)
        self.register_buffer("freqs", freqs, persistent=False)

    def angles(self, values: torch.Tensor) -> torch.Tensor:
        v = values.to(torch.float64)
        return (2.0 * math.pi / self.q) * v[..., None] * self.freqs

    def rotate(self, x: torch.Tensor, values: torch.Tensor) -> torch.Tensor:
        # x: (batch, heads, seq, head_dim); values: (batch, seq)
        # reduce mod 2 pi in double before narrowing, so wrapped values
        # produce bit-stable rotations
        theta = torch.remainder(self.angles(values), 2.0 * math.pi)
        theta = theta.to(x.dtype)[:, None, :, :]
        cos, sin = torch.cos(theta), torch.sin(theta)
        x1, x2 = x[..., 0::2], x[..., 1::2]
        out = torch.empty_like(x)
        out[..., 0::2] = x1 * cos - x2 * sin
        out[..., 1::2] = x1 * sin + x2 * cos
        return out


class _RotaryAttention(nn.Module):
    def __init__(self, dim: int, heads: int, q: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.rotary = RotaryWordRotation(self.head_dim, q)

    def forward(self, x: torch.Tensor, values: torch.Tensor) -> torch.Tensor:
        b, s, d = x.shape
        qkv = self.qkv(x).view(b, s, 3, self.heads, self.head_dim)
        qry, key, val = (qkv[:, :, i].transpose(1, 2) for i in range(3))
        qry = self.rotary.rotate(qry, values)
        key = self.rotary.rotate(key, values)
        out = F.scaled_dot_product_attention(qry, key, val)
        return self.proj(out.transpose(1, 2).reshape(b, s, d))


class _EncoderBlock(nn.Module):
    def __init__(self, dim: int, heads: int, ffn_mult: int, q: int):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = _RotaryAttention(dim, heads, q)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, ffn_mult * dim), nn.GELU(), nn.Linear(ffn_mult * dim, dim)
        )

    def forward(self, x: torch.Tensor, values: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x), values)
        return x + self.mlp(self.norm2(x))


class EncoderOnly(nn.Module):
    """Rotary-word encoder with hi/lo classification heads over b."""

    def __init__(self, cfg: ModelConfig, q: int, B: int, r: int, n: int):
        super().__init__()
        self.q, self.B, self.r, self.n = q, B, r, n
        self.n_hi = (q - 1) // B + 1
        self.n_lo = -(-B // r)
        vocab = self.n_hi + self.n_lo
        self.embed = nn.Embedding(vocab, cfg.dim)
        self.pos = nn.Embedding(2 * n, cfg.dim)
        self.blocks = nn.ModuleList(
            _EncoderBlock(cfg.dim, cfg.heads, cfg.ffn_mult, q)
            for _ in range(cfg.encoder_only_layers)
        )
        self.norm = nn.LayerNorm(cfg.dim)
        self.head_hi = nn.Linear(cfg.dim, self.n_hi)
        self.head_lo = nn.Linear(cfg.dim, self.n_lo)

    def coordinate_values(self, tokens: torch.Tensor) -> torch.Tensor:
        """Decoded coordinate value behind each input position."""
        hi = tokens[:, 0::2]
        lo = tokens[:, 1::2] - self.n_hi
        v = hi * self.B + lo * self.r
        return v.repeat_interleave(2, dim=1)

    def forward(self, tokens: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        values = self.coordinate_values(tokens)
        x = self.embed(tokens) + self.pos.weight[None, : tokens.shape[1]]
        for block in self.blocks:
            x = block(x, values)
        pooled = self.norm(x).mean(dim=1)
        return self.head_hi(pooled), self.head_lo(pooled)

    @torch.no_grad()
    def predict_dist(self, tokens: torch.Tensor) -> torch.Tensor:
        _, lo_logits = self(tokens)
        return F.softmax(lo_logits, dim=-1)

    @torch.no_grad()
    def predict_tokens(self, tokens: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        hi_logits, lo_logits = self(tokens)
        return hi_logits.argmax(-1), lo_logits.argmax(-1)


class _GatedDecoderLayer(nn.Module):
    """Decoder layer whose output passes through a copy gate."""

    def __init__(self, dim: int, heads: int, ffn_mult: int, gate_bias: float):
        super().__init__()
        self.layer = nn.TransformerDecoderLayer(
            dim, heads, ffn_mult * dim, dropout=0.0, batch_first=True,
            norm_first=True,
        )
        self.gate = nn.Linear(dim, dim)
        nn.init.zeros_(self.gate.weight)
        nn.init.constant_(self.gate.bias, gate_bias)

    def forward(self, x, memory, mask):
        update = self.layer(x, memory, tgt_mask=mask)
        g = torch.sigmoid(self.gate(x))
        return g * update + (1.0 - g) * x


class Seq2Seq(nn.Module):
    """1-layer encoder, deeper decoder with a shared (universal) tail."""

    def __init__(self, cfg: ModelConfig, q: int, B: int, r: int, n: int):
        super().__init__()
        self.q, self.B, self.r, self.n = q, B, r, n
        self.n_hi = (q - 1) // B + 1
        self.n_lo = -(-B // r)
        vocab = self.n_hi + self.n_lo
        self.bos = vocab
        self.embed = nn.Embedding(vocab + 1, cfg.dim)
        self.pos = nn.Embedding(2 * n + 4, cfg.dim)
        enc_layer = nn.TransformerEncoderLayer(
            cfg.dim, cfg.heads, cfg.ffn_mult * cfg.dim, dropout=0.0,
            batch_first=True, norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(enc_layer, cfg.encoder_layers)
        self.first = _GatedDecoderLayer(cfg.dim, cfg.heads, cfg.ffn_mult, cfg.copy_gate_bias)
        self.shared = _GatedDecoderLayer(cfg.dim, cfg.heads, cfg.ffn_mult, cfg.copy_gate_bias)
        self.shared_passes = cfg.shared_layers
        self.out = nn.Linear(cfg.dim, vocab)

    def encode(self, tokens: torch.Tensor) -> torch.Tensor:
        x = self.embed(tokens) + self.pos.weight[None, : tokens.shape[1]]
        return self.encoder(x)

    def decode(self, memory: torch.Tensor, target_in: torch.Tensor) -> torch.Tensor:
        s = target_in.shape[1]
        x = self.embed(target_in) + self.pos.weight[None, :s]
        mask = nn.Transformer.generate_square_subsequent_mask(s, device=x.device)
        x = self.first(x, memory, mask)
        for _ in range(self.shared_passes):
            x = self.shared(x, memory, mask)
        return self.out(x)

    def forward(self, tokens: torch.Tensor, target_in: torch.Tensor) -> torch.Tensor:
        return self.decode(self.encode(tokens), target_in)

    @torch.no_grad()
    def predict_tokens(self, tokens: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        memory = self.encode(tokens)
        batch = tokens.shape[0]
        seq = torch.full((batch, 1), self.bos, dtype=torch.long, device=tokens.device)
        outs = []
        for _ in range(2):
            logits = self.decode(memory, seq)[:, -1]
            nxt = logits.argmax(-1)
            outs.append(nxt)
            seq = torch.cat([seq, nxt[:, None]], dim=1)
        hi = outs[0].clamp(max=self.n_hi - 1)
        lo = (outs[1] - self.n_hi).clamp(min=0, max=self.n_lo - 1)
        return hi, lo


def build_model(cfg: ModelConfig, q: int, B: int, r: int, n: int) -> nn.Module:
    torch.manual_seed(cfg.seed)
    if cfg.arch == "encoder":
        return EncoderOnly(cfg, q, B, r, n)
    if cfg.arch == "seq2seq":
        return Seq2Seq(cfg, q, B, r, n)
    raise ValueError(f"unknown architecture {cfg.arch!r}")
