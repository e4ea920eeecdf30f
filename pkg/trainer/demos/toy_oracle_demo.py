#!/usr/bin/env python3
"""Train the toy encoder on a token file and watch it become an oracle.

The model never sees the attack lab: it reads a token file, and after
training it answers request files with lo-token distributions.  Those
distributions move when a query perturbs the active secret coordinate and
stay put elsewhere, which is exactly the signal the distinguisher needs.
"""

import tempfile
from pathlib import Path

import numpy as np
import torch

from lwetrainer.data import encode_values, load_token_file
from lwetrainer.models import ModelConfig
from lwetrainer.train import train

n, q, B, r, sigma = 16, 251, 32, 1, 1.0
rng = np.random.default_rng(0)
secret = np.zeros(n, dtype=np.int64)
secret[5] = 1
a = rng.integers(0, q, size=(20_000, n))
b = (a @ secret + np.rint(rng.normal(0, sigma, len(a))).astype(np.int64)) % q

tokens = Path(tempfile.mkdtemp()) / "tokens.txt"
with open(tokens, "w") as fh:
    fh.write(f"q={q} B={B} r={r} n={n}\n")
    for row, target in zip(a, b):
        toks = []
        for v in row:
            toks += [v // B, (v % B) // r]
        toks += [target // B, (target % B) // r]
        fh.write(" ".join(map(str, toks)) + "\n")

cfg = ModelConfig(arch="encoder", dim=64, heads=4, encoder_only_layers=2,
                  lr=2e-3, emd_weight=0.3, seed=0)
print(f"training encoder-only ({cfg.encoder_only_layers} layers, dim {cfg.dim}) "
      f"on {len(a)} samples, secret bit at coordinate 5")
model, losses = train(tokens, cfg, epochs=6, batch_size=256)

test = rng.integers(0, q, size=(64, n))
tok = lambda M: torch.from_numpy(encode_values(M, q, B, r).reshape(len(M), 2 * n))
base = model.predict_dist(tok(test)).numpy()
ks = rng.integers(int(0.3 * q) + 1, int(0.7 * q), size=64)
print("\nEMD^2 distinguisher scores per coordinate:")
for i in range(n):
    pert = test.copy()
    pert[:, i] = (pert[:, i] + ks) % q
    dist = model.predict_dist(tok(pert)).numpy()
    emd = np.abs(np.cumsum(base - dist, axis=1)).sum(axis=1)
    score = float((emd ** 2).sum())
    bar = "#" * min(60, int(score / 200))
    mark = "<- secret bit" if i == 5 else ""
    print(f"  {i:3d} {score:10.1f} {bar} {mark}")
