"""Oracle file protocol server.

Watches a request directory for `req-*.txt` files (header line, then one
query vector of n integers per line) and answers each with `rep-*.txt` in
the reply directory: one line per query, either a decimal prediction of b
(seq2seq) or `D` followed by the lo-token probabilities (encoder-only).
Replies are written to a temp name and renamed so readers never see partial
files.  Malformed requests get an `E <reason>` line and the server keeps
going.  Strictly serial: requests are handled in name order.
"""

from __future__ import annotations

import os
import time

import numpy as np
import torch

from .data import decode_tokens, encode_values
from .models import EncoderOnly
from .train import load_checkpoint

__all__ = ["answer_request", "serve_oracle"]


def _parse_request(path, n: int):
    with open(path) as fh:
        header = dict(item.split("=") for item in fh.readline().split())
        a = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    count = int(header["count"])
    if int(header["n"]) != n:
        raise ValueError(f"request dimension {header['n']} != model dimension {n}")
    if a.shape != (count, n):
        raise ValueError(f"expected {count} x {n} queries, got {a.shape}")
    return a


def answer_request(model, scheme: dict, request_path, reply_path) -> None:
    q, B, r, n = scheme["q"], scheme["B"], scheme["r"], scheme["n"]
    tmp = f"{reply_path}.tmp"
    try:
        a = _parse_request(request_path, n)
        tokens = torch.from_numpy(
            encode_values(a, q, B, r).reshape(len(a), 2 * n)
        )
        with torch.no_grad():
            if isinstance(model, EncoderOnly):
                dist = model.predict_dist(tokens).double()
                dist = dist / dist.sum(dim=-1, keepdim=True)
                lines = [
                    "D " + " ".join(repr(float(p)) for p in row) for row in dist
                ]
            else:
                hi, lo = model.predict_tokens(tokens)
                values = decode_tokens(hi.numpy(), lo.numpy(), q, B, r)
                lines = [str(int(v)) for v in values]
    except Exception as exc:  # noqa: BLE001 - protocol: error line, keep serving
        lines = [f"E {exc}"]
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, reply_path)


def serve_oracle(
    checkpoint_path,
    request_dir,
    reply_dir,
    poll: float = 0.05,
    max_requests: int | None = None,
    stop_flag=None,
) -> int:
    """Serve until max_requests answered (or forever).  Returns the count."""
    model, _, scheme = load_checkpoint(checkpoint_path)
    os.makedirs(request_dir, exist_ok=True)
    os.makedirs(reply_dir, exist_ok=True)
    answered = 0
    seen = set()
    while max_requests is None or answered < max_requests:
        if stop_flag is not None and stop_flag.is_set():
            break
        pending = sorted(
            name
            for name in os.listdir(request_dir)
            if name.startswith("req-") and name.endswith(".txt") and name not in seen
        )
        if not pending:
            time.sleep(poll)
            continue
        for name in pending:
            seen.add(name)
            reply = os.path.join(reply_dir, name.replace("req-", "rep-"))
            answer_request(model, scheme, os.path.join(request_dir, name), reply)
            answered += 1
            if max_requests is not None and answered >= max_requests:
                break
    return answered
