"""Squared earth mover's distance on the 1-d token line.

With unit spacing between buckets, EMD between two histograms is the L1
distance of their CDFs; the auxiliary loss squares it so close misses cost
quadratically less than distant ones.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

__all__ = ["emd_1d", "squared_emd_loss"]


def emd_1d(p: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
    """Per-row EMD between probability rows p and t (unit ground distance)."""
    return torch.cumsum(p - t, dim=-1).abs().sum(dim=-1)


def squared_emd_loss(lo_logits: torch.Tensor, lo_targets: torch.Tensor) -> torch.Tensor:
    """Mean squared EMD between softmax(lo_logits) and one-hot targets."""
    probs = F.softmax(lo_logits, dim=-1)
    onehot = F.one_hot(lo_targets, num_classes=lo_logits.shape[-1]).to(probs.dtype)
    return (emd_1d(probs, onehot) ** 2).mean()
