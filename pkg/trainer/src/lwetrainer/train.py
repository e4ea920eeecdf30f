"""Training loop: cross-entropy on the two target tokens, Adam with linear
warmup, optional squared-EMD auxiliary loss for the encoder-only model."""

from __future__ import annotations

import math
from dataclasses import asdict

import torch
import torch.nn.functional as F
from torch import nn

from .data import TokenFile, load_token_file
from .losses import squared_emd_loss
from .models import ModelConfig, build_model

__all__ = ["train", "save_checkpoint", "load_checkpoint"]


def _batches(data: TokenFile, batch_size: int, generator: torch.Generator):
    order = torch.randperm(len(data), generator=generator)
    for start in range(0, len(data), batch_size):
        idx = order[start : start + batch_size]
        yield data.inputs[idx], data.targets[idx]


def train(
    token_path,
    cfg: ModelConfig,
    epochs: int,
    batch_size: int = 256,
    checkpoint_path=None,
    log=print,
    model=None,
):
    """Train on a token file; returns (model, per-epoch mean losses).

    Pass a previously returned `model` to continue training it (the
    optimizer restarts, which is fine at toy scale).
    """
    data = load_token_file(token_path)
    if model is None:
        model = build_model(cfg, data.q, data.B, data.r, data.n)
    steps_per_epoch = max(1, math.ceil(len(data) / batch_size))
    total_steps = steps_per_epoch * epochs
    warmup = max(1, int(cfg.warmup_frac * total_steps))
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    sched = torch.optim.lr_scheduler.LambdaLR(
        opt, lambda step: min(1.0, (step + 1) / warmup)
    )
    gen = torch.Generator().manual_seed(cfg.seed)
    losses = []
    model.train()
    for epoch in range(epochs):
        total, count = 0.0, 0
        for inputs, targets in _batches(data, batch_size, gen):
            opt.zero_grad()
            loss = _step_loss(model, cfg, data, inputs, targets)
            loss.backward()
            opt.step()
            sched.step()
            total += float(loss.detach()) * len(inputs)
            count += len(inputs)
        losses.append(total / count)
        if log is not None:
            log(f"epoch {epoch}: loss {losses[-1]:.4f}")
    model.eval()
    if checkpoint_path is not None:
        save_checkpoint(model, cfg, data, checkpoint_path)
    return model, losses


def _step_loss(model, cfg: ModelConfig, data: TokenFile, inputs, targets):
    if cfg.arch == "encoder":
        hi_logits, lo_logits = model(inputs)
        loss = F.cross_entropy(hi_logits, targets[:, 0])
        loss = loss + F.cross_entropy(lo_logits, targets[:, 1])
        if cfg.emd_weight:
            loss = loss + cfg.emd_weight * squared_emd_loss(lo_logits, targets[:, 1])
        return loss
    # seq2seq: teacher-forced two-step decode over the shared vocabulary
    shifted = targets.clone()
    shifted[:, 1] += model.n_hi
    bos = torch.full((len(inputs), 1), model.bos, dtype=torch.long)
    target_in = torch.cat([bos, shifted[:, :1]], dim=1)
    logits = model(inputs, target_in)
    return F.cross_entropy(logits.reshape(-1, logits.shape[-1]), shifted.reshape(-1))


def save_checkpoint(model: nn.Module, cfg: ModelConfig, data: TokenFile, path) -> None:
    torch.save(
        {
            "config": asdict(cfg),
            "scheme": {"q": data.q, "B": data.B, "r": data.r, "n": data.n},
            "state": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path):
    blob = torch.load(path, map_location="cpu", weights_only=False)
    cfg = ModelConfig(**blob["config"])
    s = blob["scheme"]
    model = build_model(cfg, s["q"], s["B"], s["r"], s["n"])
    model.load_state_dict(blob["state"])
    model.eval()
    return model, cfg, s
