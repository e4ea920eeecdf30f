"""Experiment orchestration: flat-file configs, staged runs, and reports.

A config is a flat key-value text file with section-prefixed keys
(`lwe.n = 32`).  `run_experiment` executes gen, preprocess, optional token
export, analyze, and attack, persisting every stage's artifacts under the
output directory.  Completed stages are skipped on re-runs: each stage
writes a hash of the config slice it depends on, and a matching hash with
intact outputs means the stage is a no-op.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import nomod, scaling_predict
from .core import (
    LweParams,
    Secret,
    SecretDist,
    gen_samples,
    load_samples,
    sample_secret,
    save_samples,
)
from .oracles import CheatingOracle, FileOracle
from .presets import modulus_for
from .recovery import recover
from .reduction import ReductionConfig, build_training_set, reduction_factor
from .tokens import TokenScheme, export_dataset

__all__ = [
    "ExperimentConfig",
    "StageReport",
    "RunReport",
    "parse_config",
    "load_config",
    "save_secret",
    "load_secret",
    "run_experiment",
]

OUTPUT_ROOT_ENV = "LWELAB_OUT"


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    q: int
    sigma_e: float = 3.0
    dist: SecretDist = SecretDist.BINARY
    h: int = 3
    secret_seed: int = 1
    sample_count: int | None = None
    sample_seed: int = 2
    reduction: ReductionConfig = field(default_factory=ReductionConfig)
    target_count: int = 256
    reduction_seed: int = 3
    jobs: int = 1
    export_tokens: bool = False
    bucket: int = 1
    oracle: str = "cheat"  # "cheat" | "file"
    h_max: int | None = None
    oracle_noise: float | None = None  # default: sigma_e
    oracle_confusion: float = 0.0
    recovery_seed: int = 4
    test_vectors: int = 128  # per-epoch query budget for the distinguisher
    request_dir: str | None = None
    reply_dir: str | None = None
    oracle_timeout: float = 60.0
    out: str = "run"

    @property
    def params(self) -> LweParams:
        return LweParams(n=self.n, q=self.q, sigma_e=self.sigma_e)


_SECTIONS = {
    "lwe.n": ("n", int),
    "lwe.q": ("q", int),
    "lwe.logq": ("logq", int),
    "lwe.sigma_e": ("sigma_e", float),
    "secret.dist": ("dist", str),
    "secret.h": ("h", int),
    "secret.seed": ("secret_seed", int),
    "samples.count": ("sample_count", int),
    "samples.seed": ("sample_seed", int),
    "reduction.omega": ("omega", int),
    "reduction.beta1": ("beta1", int),
    "reduction.beta2": ("beta2", int),
    "reduction.delta1": ("delta1", float),
    "reduction.delta2": ("delta2", float),
    "reduction.rows_per_matrix": ("rows_per_matrix", int),
    "reduction.max_tours": ("max_tours", int),
    "reduction.target_count": ("target_count", int),
    "reduction.seed": ("reduction_seed", int),
    "reduction.jobs": ("jobs", int),
    "tokens.export": ("export_tokens", lambda v: v.lower() in ("1", "true", "yes")),
    "tokens.bucket": ("bucket", int),
    "tokens.q": ("tokens_q", int),
    "recovery.oracle": ("oracle", str),
    "recovery.h_max": ("h_max", int),
    "recovery.noise": ("oracle_noise", float),
    "recovery.confusion": ("oracle_confusion", float),
    "recovery.seed": ("recovery_seed", int),
    "recovery.test_vectors": ("test_vectors", int),
    "recovery.request_dir": ("request_dir", str),
    "recovery.reply_dir": ("reply_dir", str),
    "recovery.timeout": ("oracle_timeout", float),
    "out": ("out", str),
}

_REDUCTION_KEYS = (
    "omega",
    "beta1",
    "beta2",
    "delta1",
    "delta2",
    "rows_per_matrix",
    "max_tours",
)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat `section.key = value` format."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        if key not in _SECTIONS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        name, cast = _SECTIONS[key]
        raw[name] = cast(value)
    if "n" not in raw:
        raise ValueError("config must set lwe.n")
    if "q" not in raw:
        if "logq" not in raw:
            raise ValueError("config must set lwe.q or lwe.logq")
        raw["q"] = modulus_for(raw["n"], raw.pop("logq"))
    raw.pop("logq", None)
    tokens_q = raw.pop("tokens_q", None)
    if tokens_q is not None and tokens_q != raw["q"]:
        raise ValueError(
            f"inconsistent config: tokens.q={tokens_q} but lwe.q={raw['q']}"
        )
    red_kwargs = {k: raw.pop(k) for k in list(raw) if k in _REDUCTION_KEYS}
    cfg = ExperimentConfig(
        reduction=ReductionConfig(**red_kwargs),
        **{k: (SecretDist(v) if k == "dist" else v) for k, v in raw.items()},
    )
    if cfg.oracle not in ("cheat", "file"):
        raise ValueError(f"unknown oracle kind {cfg.oracle!r}")
    if cfg.h > cfg.n:
        raise ValueError("secret.h exceeds lwe.n")
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def save_secret(secret: Secret, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"dist={secret.dist.value} n={secret.n} h={secret.h}\n")
        fh.write(" ".join(str(int(v)) for v in secret.entries) + "\n")


def load_secret(path) -> Secret:
    with open(path) as fh:
        header = dict(item.split("=") for item in fh.readline().split())
        entries = np.array(fh.readline().split(), dtype=np.int64)
    secret = Secret(SecretDist(header["dist"]), entries)
    if secret.n != int(header["n"]) or secret.h != int(header["h"]):
        raise ValueError(f"{path}: secret does not match its header")
    return secret


@dataclass
class StageReport:
    name: str
    status: str  # "done" | "cached" | "failed" | "skipped"
    seconds: float = 0.0
    details: dict = field(default_factory=dict)


@dataclass
class RunReport:
    stages: list
    out_dir: str

    @property
    def total_seconds(self) -> float:
        return sum(s.seconds for s in self.stages)

    def stage(self, name: str) -> StageReport:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for s in self.stages:
                fh.write(f"stage,{s.name},{s.status},{s.seconds:.3f}\n")
                for key, value in s.details.items():
                    fh.write(f"{s.name}.{key},{value}\n")
            fh.write(f"total_seconds,{self.total_seconds:.3f}\n")


def _stage_hash(name: str, payload: dict) -> str:
    blob = json.dumps({"stage": name, **payload}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _cached(out: Path, name: str, digest: str, outputs: list) -> bool:
    marker = out / f"{name}.hash"
    if not marker.exists() or marker.read_text().strip() != digest:
        return False
    return all((out / f).exists() for f in outputs)


def _mark(out: Path, name: str, digest: str) -> None:
    (out / f"{name}.hash").write_text(digest + "\n")


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    """Execute gen -> preprocess -> (tokens) -> analyze -> attack, resumably."""
    root = Path(out_dir) if out_dir is not None else Path(
        os.environ.get(OUTPUT_ROOT_ENV, ".")
    ) / cfg.out
    root.mkdir(parents=True, exist_ok=True)
    stages: list[StageReport] = []
    report = RunReport(stages=stages, out_dir=str(root))
    failed = False

    def run_stage(name: str, payload: dict, outputs: list, fn):
        nonlocal failed
        if failed:
            stages.append(StageReport(name, "skipped"))
            return None
        digest = _stage_hash(name, payload)
        if _cached(root, name, digest, outputs):
            stages.append(StageReport(name, "cached"))
            return None
        start = time.perf_counter()
        try:
            details = fn() or {}
        except Exception as exc:  # noqa: BLE001 - recorded, downstream skipped
            stages.append(
                StageReport(
                    name, "failed", time.perf_counter() - start, {"error": str(exc)}
                )
            )
            failed = True
            return None
        _mark(root, name, digest)
        stages.append(StageReport(name, "done", time.perf_counter() - start, details))
        return details

    params = cfg.params

    def stage_gen():
        secret = sample_secret(params, cfg.dist, cfg.h, cfg.secret_seed)
        originals = gen_samples(params, secret, cfg.sample_count, cfg.sample_seed)
        save_secret(secret, root / "secret.txt")
        save_samples(originals, root / "originals.txt")
        return {"count": len(originals), "h": secret.h}

    run_stage(
        "gen",
        {
            "params": asdict(params),
            "dist": cfg.dist.value,
            "h": cfg.h,
            "secret_seed": cfg.secret_seed,
            "sample_count": cfg.sample_count,
            "sample_seed": cfg.sample_seed,
        },
        ["secret.txt", "originals.txt"],
        stage_gen,
    )

    def stage_preprocess():
        originals = load_samples(root / "originals.txt")
        train, heldout = build_training_set(
            originals,
            cfg.reduction,
            cfg.target_count,
            cfg.reduction_seed,
            jobs=cfg.jobs,
            metrics_path=root / "metrics.csv",
        )
        save_samples(train, root / "train.txt")
        save_samples(heldout, root / "heldout.txt")
        return {
            "train": len(train),
            "heldout": len(heldout),
            "factor": f"{reduction_factor(train.a, params.q):.4f}",
        }

    run_stage(
        "preprocess",
        {
            "reduction": asdict(cfg.reduction),
            "target_count": cfg.target_count,
            "seed": cfg.reduction_seed,
        },
        ["train.txt", "heldout.txt", "metrics.csv"],
        stage_preprocess,
    )

    if cfg.export_tokens:

        def stage_tokens():
            train = load_samples(root / "train.txt")
            scheme = TokenScheme.for_modulus(params.q, cfg.bucket)
            export_dataset(train, scheme, root / "tokens.txt")
            return {"vocab": scheme.vocab_size}

        run_stage(
            "export-tokens",
            {"q": params.q, "bucket": cfg.bucket},
            ["tokens.txt"],
            stage_tokens,
        )

    def stage_analyze():
        train = load_samples(root / "train.txt")
        secret = load_secret(root / "secret.txt")
        rep = nomod(train, secret)
        sigma_a = float(np.std(_centered(train.a, params.q)))
        pred = scaling_predict(params, max(sigma_a, 1e-9), secret.h)
        rows = {
            "nomod_percent": f"{rep.percentage:.3f}",
            "nomod_threshold_hit": rep.threshold_hit,
            "sample_count": rep.sample_count,
            "reduction_factor": f"{reduction_factor(train.a, params.q):.4f}",
            "sigma_a": f"{sigma_a:.3f}",
            "predicted_max_h": pred.max_h,
            "predicted_recoverable": pred.recoverable,
        }
        with open(root / "analysis.csv", "w") as fh:
            for key, value in rows.items():
                fh.write(f"{key},{value}\n")
        return rows

    run_stage("analyze", {"seed": cfg.secret_seed}, ["analysis.csv"], stage_analyze)

    def stage_attack():
        originals = load_samples(root / "originals.txt")
        heldout = load_samples(root / "heldout.txt")
        secret = load_secret(root / "secret.txt")
        if cfg.oracle == "cheat":
            noise = cfg.sigma_e if cfg.oracle_noise is None else cfg.oracle_noise
            oracle = CheatingOracle(
                secret=secret,
                params=params,
                noise_std=noise,
                confusion=cfg.oracle_confusion,
                seed=cfg.recovery_seed,
            )
        else:
            if not cfg.request_dir or not cfg.reply_dir:
                raise ValueError("file oracle needs recovery.request_dir and reply_dir")
            oracle = FileOracle(
                cfg.request_dir, cfg.reply_dir, params, timeout=cfg.oracle_timeout
            )
        h_max = cfg.h_max if cfg.h_max is not None else max(1, -(-params.n // 20))
        result = recover(
            oracle,
            heldout,
            originals,
            cfg.dist,
            h_range=range(1, h_max + 1),
            seed=cfg.recovery_seed,
            reference_secret=secret,
        )
        lines = {
            "status": result.status.value,
            "h_used": result.h_used,
            "support_match": result.diagnostics.get("support_match"),
        }
        with open(root / "attack.txt", "w") as fh:
            for key, value in lines.items():
                fh.write(f"{key},{value}\n")
            if result.guess is not None:
                fh.write(
                    "guess," + " ".join(str(int(v)) for v in result.guess.entries) + "\n"
                )
        if result.guess is not None:
            lines["recovered_true_secret"] = bool(
                np.array_equal(result.guess.entries, secret.entries)
            )
        return lines

    run_stage(
        "attack",
        {
            "oracle": cfg.oracle,
            "h_max": cfg.h_max,
            "noise": cfg.oracle_noise,
            "confusion": cfg.oracle_confusion,
            "seed": cfg.recovery_seed,
            "test_vectors": cfg.test_vectors,
        },
        ["attack.txt"],
        stage_attack,
    )

    report.save(root / "report.txt")
    return report


def _centered(a: np.ndarray, q: int) -> np.ndarray:
    c = np.mod(a, q).astype(np.float64)
    return np.where(2 * c > q, c - q, c)
