"""Command line: train a model on a token file, or serve a checkpoint."""

from __future__ import annotations

import argparse
import sys

from .models import ModelConfig
from .serve import serve_oracle
from .train import train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lwetrainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a token file")
    p.add_argument("--tokens", required=True)
    p.add_argument("--arch", choices=["encoder", "seq2seq"], default="encoder")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--lr", type=float, default=1e-3, help="toy default; the full-scale setting is 1e-5")
    p.add_argument("--emd-weight", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("serve", help="answer oracle requests from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--request-dir", required=True)
    p.add_argument("--reply-dir", required=True)
    p.add_argument("--max-requests", type=int, default=None)
    p.add_argument("--poll", type=float, default=0.05)
    p.set_defaults(fn=_cmd_serve)
    return parser


def _cmd_train(args) -> int:
    cfg = ModelConfig(
        arch=args.arch,
        dim=args.dim,
        heads=args.heads,
        lr=args.lr,
        emd_weight=args.emd_weight,
        seed=args.seed,
    )
    _, losses = train(
        args.tokens, cfg, epochs=args.epochs, batch_size=args.batch_size,
        checkpoint_path=args.out,
    )
    print(f"checkpoint,{args.out}")
    print(f"final_loss,{losses[-1]:.4f}")
    return 0


def _cmd_serve(args) -> int:
    answered = serve_oracle(
        args.checkpoint, args.request_dir, args.reply_dir,
        poll=args.poll, max_requests=args.max_requests,
    )
    print(f"answered,{answered}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
