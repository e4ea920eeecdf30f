"""Command-line front end.

Subcommands: gen, preprocess, analyze, attack, usvp, estimate,
export-tokens, run.  Output paths default under the directory named by the
LWELAB_OUT environment variable (falling back to the working directory).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import kickout_expected_cost, kickout_probability, nomod, scaling_predict
from .core import (
    LweParams,
    SampleSet,
    SecretDist,
    center,
    gen_samples,
    load_samples,
    sample_secret,
    save_samples,
)
from .oracles import CheatingOracle, FileOracle
from .pipeline import (
    OUTPUT_ROOT_ENV,
    load_config,
    load_secret,
    run_experiment,
    save_secret,
)
from .presets import modulus_for
from .recovery import recover
from .reduction import ReductionConfig, build_training_set, reduction_factor
from .tokens import TokenScheme, export_dataset
from .tricks import (
    dimension_reduce,
    hamming_reduce,
    permute_instance,
    permuted_secret,
    random_permutation,
    restore_permuted_secret,
)
from .usvp import UsvpConfig, usvp_attack


def _out_dir(arg: str | None, default_name: str) -> Path:
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
    out = Path(arg) if arg else root / default_name
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(args) -> int:
    if args.q is not None:
        q = args.q
    elif args.logq is not None:
        q = modulus_for(args.n, args.logq)
    else:
        raise SystemExit("gen: need --q or --logq")
    params = LweParams(n=args.n, q=q, sigma_e=args.sigma_e)
    secret = sample_secret(params, SecretDist(args.dist), args.h, args.seed)
    originals = gen_samples(params, secret, args.count, args.seed)
    out = _out_dir(args.out, "gen")
    save_secret(secret, out / "secret.txt")
    save_samples(originals, out / "originals.txt")
    print(f"wrote {len(originals)} samples (n={args.n}, q={q}) to {out}")
    return 0


def _cmd_preprocess(args) -> int:
    originals = load_samples(args.infile)
    cfg = ReductionConfig(
        omega=args.omega,
        beta1=args.beta1,
        beta2=args.beta2,
        delta1=args.delta1,
        delta2=args.delta2,
        rows_per_matrix=args.rows_per_matrix,
        max_tours=args.max_tours,
    )
    out = _out_dir(args.out, "preprocess")
    train, heldout = build_training_set(
        originals,
        cfg,
        args.target_count,
        args.seed,
        jobs=args.jobs,
        metrics_path=out / "metrics.csv",
    )
    save_samples(train, out / "train.txt")
    save_samples(heldout, out / "heldout.txt")
    factor = reduction_factor(train.a, originals.params.q)
    print(
        f"reduced {len(train)} train + {len(heldout)} held-out pairs, "
        f"factor {factor:.4f}, metrics in {out / 'metrics.csv'}"
    )
    return 0


def _cmd_analyze(args) -> int:
    samples = load_samples(args.infile)
    secret = load_secret(args.secret)
    rep = nomod(samples, secret)
    q = samples.params.q
    sigma_a = float(np.std(center(samples.a, q).astype(np.float64)))
    pred = scaling_predict(samples.params, max(sigma_a, 1e-9), secret.h)
    rows = [
        ("nomod_percent", f"{rep.percentage:.3f}"),
        ("nomod_threshold_hit", rep.threshold_hit),
        ("sample_count", rep.sample_count),
        ("reduction_factor", f"{reduction_factor(samples.a, q):.4f}"),
        ("sigma_a", f"{sigma_a:.3f}"),
        ("sigma_x_predicted", f"{pred.sigma_x:.3f}"),
        ("predicted_max_h", pred.max_h),
        ("predicted_recoverable", pred.recoverable),
    ]
    for key, value in rows:
        print(f"{key},{value}")
    if args.histogram:
        x = (
            center(samples.a, q).astype(np.float64) @ secret.entries
            - center(samples.b, q)
        )
        hist, edges = np.histogram(x, bins=args.bins)
        with open(args.histogram, "w") as fh:
            fh.write("bin_left,count\n")
            for left, count in zip(edges[:-1], hist):
                fh.write(f"{left:.1f},{int(count)}\n")
        print(f"histogram,{args.histogram}")
    return 0


def _cmd_attack(args) -> int:
    originals = load_samples(args.originals)
    heldout = load_samples(args.heldout)
    params = originals.params
    out = _out_dir(args.out, "attack")
    secret = load_secret(args.secret) if args.secret else None
    permutation = None
    if args.permute_seed is not None:
        permutation = random_permutation(params.n, args.permute_seed)
        originals, _ = permute_instance(originals, permutation)
        heldout = SampleSet(
            params=heldout.params,
            a=permutation.apply(heldout.a),
            b=heldout.b.copy(),
            kind=heldout.kind,
            seed=heldout.seed,
        )
        if secret is not None:
            secret = permuted_secret(secret, permutation)

    if args.oracle == "cheat":
        if secret is None:
            raise SystemExit("attack: the cheating oracle needs --secret")
        oracle = CheatingOracle(
            secret=secret,
            params=params,
            noise_std=params.sigma_e if args.noise is None else args.noise,
            confusion=args.confusion,
            seed=args.seed,
        )
    else:
        if not (args.request_dir and args.reply_dir):
            raise SystemExit("attack: the file oracle needs --request-dir/--reply-dir")
        oracle = FileOracle(
            args.request_dir, args.reply_dir, params, timeout=args.timeout
        )

    dist = SecretDist(args.dist)
    h_max = args.h_max if args.h_max is not None else max(1, -(-params.n // 20))
    result = recover(
        oracle,
        heldout,
        originals,
        dist,
        h_range=range(1, h_max + 1),
        seed=args.seed,
        reference_secret=secret,
    )
    guess = result.guess
    if guess is not None and permutation is not None:
        guess = restore_permuted_secret(guess, permutation)
    print(f"status,{result.status.value}")
    print(f"h_used,{result.h_used}")
    if guess is not None:
        save_secret(guess, out / "recovered_secret.txt")
        print(f"recovered_secret,{out / 'recovered_secret.txt'}")

    scores = result.diagnostics.get("scores")
    if scores is not None and (args.drop_lowest or args.flip_top):
        order = np.argsort(scores)
        if args.drop_lowest:
            drop = np.sort(order[: args.drop_lowest])
            reduced = dimension_reduce(load_samples(args.originals), drop)
            save_samples(reduced, out / "dropped_originals.txt")
            np.savetxt(out / "dropped_indices.txt", drop, fmt="%d")
            print(f"dropped_instance,{out / 'dropped_originals.txt'}")
        if args.flip_top:
            flip = np.sort(order[::-1][: args.flip_top])
            flipped = hamming_reduce(load_samples(args.originals), flip, dist)
            save_samples(flipped, out / "flipped_originals.txt")
            np.savetxt(out / "flipped_indices.txt", flip, fmt="%d")
            print(f"flipped_instance,{out / 'flipped_originals.txt'}")
    return 0 if result.status.value != "failure" else 1


def _cmd_usvp(args) -> int:
    originals = load_samples(args.infile)
    cfg = UsvpConfig(
        blocksize=args.beta,
        max_loops=args.max_loops,
        embedding_factor=args.embedding_factor,
    )
    out = _out_dir(args.out, "usvp")
    result = usvp_attack(originals, cfg, metrics_path=out / "metrics.csv")
    print(f"loops,{result.loops_used}")
    print(f"wall_seconds,{result.wall_time:.2f}")
    print(f"best_norm,{result.best_norm:.2f}")
    if result.secret is not None:
        save_secret(result.secret, out / "recovered_secret.txt")
        print(f"status,recovered")
        print(f"recovered_secret,{out / 'recovered_secret.txt'}")
        return 0
    print("status,failure")
    return 1


def _cmd_estimate(args) -> int:
    if args.k is not None:
        p = kickout_probability(args.n, args.h, args.k)
        print(f"kickout_probability,{p:.6g}")
        print(f"expected_cost_multiplier,{(1.0 / p if p else float('inf')):.6g}")
        if args.base_cost is not None:
            print(
                f"expected_cost,{kickout_expected_cost(args.base_cost, args.n, args.h, args.k):.6g}"
            )
    if args.sigma_a is not None:
        if args.q is None:
            raise SystemExit("estimate: --sigma-a needs --q")
        params = LweParams(n=args.n, q=args.q, sigma_e=args.sigma_e)
        pred = scaling_predict(params, args.sigma_a, args.h)
        print(f"sigma_x,{pred.sigma_x:.3f}")
        print(f"max_h,{pred.max_h}")
        print(f"recoverable,{pred.recoverable}")
    return 0


def _cmd_export_tokens(args) -> int:
    samples = load_samples(args.infile)
    q = samples.params.q
    scheme = (
        TokenScheme(q=q, B=args.base, r=args.bucket or 1)
        if args.base
        else TokenScheme.for_modulus(q, args.bucket)
    )
    out = _out_dir(args.out, "tokens")
    export_dataset(samples, scheme, out / "tokens.txt")
    print(
        f"wrote {len(samples)} lines, B={scheme.B}, r={scheme.r}, "
        f"vocab={scheme.vocab_size} to {out / 'tokens.txt'}"
    )
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_experiment(cfg, out_dir=args.out)
    for stage in report.stages:
        print(f"stage,{stage.name},{stage.status},{stage.seconds:.2f}")
    print(f"total_seconds,{report.total_seconds:.2f}")
    print(f"report,{Path(report.out_dir) / 'report.txt'}")
    return 0 if all(s.status != "failed" for s in report.stages) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lwelab",
        description="Desk-scale lab for ML-style attacks on LWE.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an LWE instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--logq", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--sigma-e", type=float, default=3.0)
    p.add_argument("--dist", choices=[d.value for d in SecretDist], default="binary")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None, help="default 4n")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("preprocess", help="lattice-reduce original samples")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--omega", type=int, default=10)
    p.add_argument("--beta1", type=int, default=6)
    p.add_argument("--beta2", type=int, default=8)
    p.add_argument("--delta1", type=float, default=0.96)
    p.add_argument("--delta2", type=float, default=0.99)
    p.add_argument("--target-count", type=int, default=256)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--rows-per-matrix", type=int, default=None)
    p.add_argument("--max-tours", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_preprocess)

    p = sub.add_parser("analyze", help="NoMod and scaling-law report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--secret", required=True)
    p.add_argument("--histogram", help="optional per-sample x histogram CSV")
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("attack", help="distinguisher-based secret recovery")
    p.add_argument("--train", help="reduced training set (diagnostics only)")
    p.add_argument("--heldout", required=True)
    p.add_argument("--originals", required=True)
    p.add_argument("--oracle", choices=["cheat", "file"], default="cheat")
    p.add_argument("--dist", choices=[d.value for d in SecretDist], default="binary")
    p.add_argument("--h-max", type=int, default=None)
    p.add_argument("--secret", help="true secret file (cheat oracle / lab checks)")
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--confusion", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--request-dir")
    p.add_argument("--reply-dir")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--permute-seed", type=int, default=None)
    p.add_argument("--drop-lowest", type=int, default=0, metavar="K")
    p.add_argument("--flip-top", type=int, default=0, metavar="K")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_attack)

    p = sub.add_parser("usvp", help="classical uSVP baseline attack")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--beta", type=int, default=16)
    p.add_argument("--max-loops", type=int, default=20)
    p.add_argument("--embedding-factor", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_usvp)

    p = sub.add_parser("estimate", help="combinatorial and scaling estimates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--base-cost", type=float, default=None)
    p.add_argument("--sigma-a", type=float, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--sigma-e", type=float, default=3.0)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("export-tokens", help="serialize samples as token lines")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--base", type=int, default=None, help="default ceil(q/8)")
    p.add_argument("--bucket", type=int, default=None, help="default: smallest valid")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_export_tokens)

    p = sub.add_parser("run", help="run a full experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
