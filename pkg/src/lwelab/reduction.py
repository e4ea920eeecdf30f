"""Preprocessing: turn original samples into reduced samples with the same secret.

Rows are drawn without replacement from the original set into blocks (A, b).
Each block is embedded as

    L' = [[ 0      q*I_n ],
          [ w*I_m  A     ]]

and reduced by interleaved LLL / enumeration-BKZ tours with an adaptive
schedule.  Any unimodular transform T of L' has left block w*R, so the row
transformation R is read off directly and (R A mod q, R b mod q) are valid
samples for the original secret with error R e.  The tour schedule starts at
(beta1, delta1), upgrades to (beta2, delta2) once a tour improves the entry
stddev by less than 5%, and stops once improvement falls under the stop
rule's threshold (default 1%) or the tour budget is exhausted.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import LweParams, SampleKind, SampleSet, center
from .lattice import PrecisionExhausted, ReductionEngine
from .rng import derive_seed, make_rng

__all__ = [
    "ReductionConfig",
    "MatrixBlock",
    "ReductionOutput",
    "ReductionError",
    "ReductionPrecisionError",
    "build_embedding",
    "assemble_matrices",
    "reduce_matrix",
    "reduction_factor",
    "build_training_set",
    "write_metrics",
]

HELD_OUT_COUNT = 128


class ReductionError(RuntimeError):
    """Reduction produced unusable output (degenerate) or too many failures."""


class ReductionPrecisionError(RuntimeError):
    """Precision ladder exhausted; `best` carries the best output so far."""

    def __init__(self, message: str, best: "ReductionOutput | None"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ReductionConfig:
    omega: int = 10
    beta1: int = 6
    beta2: int = 8
    delta1: float = 0.96
    delta2: float = 0.99
    precision_bits: tuple = (53, 106, 212)
    min_improvement: float = 0.01   # stop rule: relative stddev gain per tour
    upgrade_improvement: float = 0.05
    max_tours: int = 50
    rows_per_matrix: int | None = None  # default n; e.g. 448 for n=512

    def __post_init__(self) -> None:
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        if not 2 <= self.beta1 <= self.beta2:
            raise ValueError("need 2 <= beta1 <= beta2")
        # paper-scale blocksizes (35-40) are legal configuration; the engine
        # enforces its unpruned-enumeration cap only when a tour actually runs
        for delta in (self.delta1, self.delta2):
            if not 0.25 < delta <= 1.0:
                raise ValueError(f"delta {delta} outside (0.25, 1.0]")
        if self.max_tours < 1:
            raise ValueError("max_tours must be >= 1")

    def rows(self, n: int) -> int:
        m = self.rows_per_matrix if self.rows_per_matrix is not None else n
        if m < 1:
            raise ValueError("rows_per_matrix must be >= 1")
        return m


@dataclass
class MatrixBlock:
    """One sampled (A, b) block plus the indices of its source samples."""

    a: np.ndarray
    b: np.ndarray
    indices: np.ndarray
    params: LweParams
    errors: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.a.shape[0]


@dataclass
class ReductionOutput:
    """Reduced pairs, the row transformation that produced them, and metrics."""

    r_rows: np.ndarray      # (kept, m) integer transformation rows
    a: np.ndarray           # (kept, n) reduced vectors in [0, q)
    b: np.ndarray           # (kept,) reduced targets in [0, q)
    indices: np.ndarray     # source sample indices of the block
    factor: float
    tours: int
    factor_history: list = field(default_factory=list)

    def __len__(self) -> int:
        return self.a.shape[0]


def build_embedding(a_block: np.ndarray, q: int, omega: int) -> np.ndarray:
    """The (m+n)x(m+n) embedding with q-rows first and [w*I | A] rows below."""
    m, n = a_block.shape
    lam = np.zeros((m + n, m + n), dtype=np.int64)
    lam[:n, m:] = q * np.eye(n, dtype=np.int64)
    lam[n:, :m] = omega * np.eye(m, dtype=np.int64)
    lam[n:, m:] = a_block
    return lam


def assemble_matrices(
    originals: SampleSet, cfg: ReductionConfig, count: int, seed: int
) -> list[MatrixBlock]:
    """Sample `count` blocks of rows_per_matrix rows, each without replacement."""
    m = cfg.rows(originals.params.n)
    if m > len(originals):
        raise ValueError(
            f"rows_per_matrix={m} exceeds the {len(originals)} available samples"
        )
    if count < 1:
        raise ValueError("count must be >= 1")
    blocks = []
    for i in range(count):
        rng = make_rng(derive_seed(seed, "assemble", i))
        idx = rng.choice(len(originals), size=m, replace=False)
        blocks.append(
            MatrixBlock(
                a=originals.a[idx].copy(),
                b=originals.b[idx].copy(),
                indices=idx,
                params=originals.params,
                errors=None if originals.errors is None else originals.errors[idx].copy(),
            )
        )
    return blocks


def _extract_output(
    basis: np.ndarray, block: MatrixBlock, omega: int, tours: int, history: list
) -> ReductionOutput:
    m = block.m
    q = block.params.q
    left = basis[:, :m]
    if (np.mod(left, omega) != 0).any():
        raise ReductionError("left block not divisible by omega; embedding corrupted")
    r_rows = left // omega
    a_red = np.mod(basis[:, m:], q)
    b_red = _mod_matvec(r_rows, block.b, q)
    keep = ~(a_red == 0).all(axis=1)
    r_rows, a_red, b_red = r_rows[keep], a_red[keep], b_red[keep]
    if len(a_red) < (m + block.params.n) // 4:
        raise ReductionError(
            f"degenerate reduction: only {len(a_red)} usable rows "
            f"of {m + block.params.n}"
        )
    factor = reduction_factor(a_red, q)
    return ReductionOutput(
        r_rows=np.asarray(r_rows, dtype=np.int64),
        a=np.asarray(a_red, dtype=np.int64),
        b=np.asarray(b_red, dtype=np.int64),
        indices=block.indices,
        factor=factor,
        tours=tours,
        factor_history=history,
    )


def _mod_matvec(rows: np.ndarray, vec: np.ndarray, q: int) -> np.ndarray:
    if rows.dtype == object:
        return np.mod(rows @ vec.astype(object), q).astype(np.int64)
    return np.mod(rows.astype(np.int64) @ vec.astype(np.int64), q)


def _block_stddev(basis: np.ndarray, m: int, q: int) -> float:
    a_red = np.mod(basis[:, m:], q)
    keep = ~(a_red == 0).all(axis=1)
    if not keep.any():
        return 0.0
    return float(np.std(center(a_red[keep], q).astype(np.float64)))


def reduce_matrix(block: MatrixBlock, cfg: ReductionConfig) -> ReductionOutput:
    """Run the interleaved reduction schedule on one block."""
    q = block.params.q
    engine = ReductionEngine(
        build_embedding(block.a, q, cfg.omega), cfg.precision_bits
    )
    beta, delta = cfg.beta1, cfg.delta1
    upgraded = False
    best_basis = engine.basis()
    best_std = _block_stddev(best_basis, block.m, q)
    history: list[float] = []
    tours = 0
    uniform = q / math.sqrt(12.0)
    try:
        for _ in range(cfg.max_tours):
            engine.lll(delta)
            engine.bkz_tour(beta, delta)
            tours += 1
            std = _block_stddev(engine.B, block.m, q)
            improvement = (best_std - std) / best_std if best_std > 0 else 0.0
            if std < best_std:
                best_basis = engine.basis()
                best_std = std
                history.append(best_std / uniform)
            if improvement < cfg.upgrade_improvement and not upgraded:
                beta, delta = cfg.beta2, cfg.delta2
                upgraded = True
                continue
            if improvement < cfg.min_improvement and upgraded:
                break
    except PrecisionExhausted as exc:
        best = None
        try:
            best = _extract_output(best_basis, block, cfg.omega, tours, history)
        except ReductionError:
            pass
        raise ReductionPrecisionError(str(exc), best) from exc
    return _extract_output(best_basis, block, cfg.omega, tours, history)


def reduction_factor(a, q: int) -> float:
    """stddev of centered entries over the uniform stddev q/sqrt(12)."""
    a = np.asarray(a)
    if a.size == 0:
        raise ValueError("reduction factor of an empty set is undefined")
    return float(np.std(center(a, q).astype(np.float64)) / (q / math.sqrt(12.0)))


def _reduce_indexed(job):
    index, block, cfg = job
    start = time.perf_counter()
    try:
        out = reduce_matrix(block, cfg)
        return index, out, time.perf_counter() - start, None
    except (ReductionError, ReductionPrecisionError) as exc:
        return index, None, time.perf_counter() - start, str(exc)


def build_training_set(
    originals: SampleSet,
    cfg: ReductionConfig,
    target_count: int,
    seed: int,
    jobs: int = 1,
    metrics_path=None,
) -> tuple[SampleSet, SampleSet]:
    """Reduce enough matrices to produce `target_count` pairs; hold out 128.

    Matrices are independent and may run in worker processes; results are
    merged by matrix index so the output does not depend on completion order.
    Individual matrix failures are tolerated up to half the batch.
    """
    if target_count < 256:
        raise ValueError("target_count must be >= 256 (128 held out)")
    n = originals.params.n
    m = cfg.rows(n)
    per_matrix = m + n
    n_matrices = -(-target_count // per_matrix)
    blocks = assemble_matrices(originals, cfg, n_matrices, seed)
    jobs = max(1, jobs)
    work = [(i, block, cfg) for i, block in enumerate(blocks)]
    if jobs == 1:
        results = [_reduce_indexed(job) for job in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_reduce_indexed, work))
    results.sort(key=lambda item: item[0])
    outputs = [(i, out, wall) for i, out, wall, err in results if out is not None]
    failures = [(i, err) for i, _, _, err in results if err is not None]
    if len(outputs) * 2 < len(blocks):
        raise ReductionError(
            f"{len(failures)}/{len(blocks)} matrices failed: {failures[:3]}"
        )
    if metrics_path is not None:
        write_metrics(
            metrics_path,
            [(i, out.tours, out.factor, wall) for i, out, wall in outputs],
        )
    a = np.concatenate([out.a for _, out, _ in outputs])
    b = np.concatenate([out.b for _, out, _ in outputs])
    errors = None
    if originals.errors is not None:
        errors = np.concatenate(
            [out.r_rows @ originals.errors[out.indices] for _, out, _ in outputs]
        )
    held = min(HELD_OUT_COUNT, len(a) // 2)
    heldout = SampleSet(
        params=originals.params,
        a=a[:held],
        b=b[:held],
        kind=SampleKind.HELD_OUT,
        seed=derive_seed(seed, "heldout"),
        errors=None if errors is None else errors[:held],
    )
    train = SampleSet(
        params=originals.params,
        a=a[held:],
        b=b[held:],
        kind=SampleKind.REDUCED,
        seed=derive_seed(seed, "train"),
        errors=None if errors is None else errors[held:],
    )
    return train, heldout


def write_metrics(path, records) -> None:
    """Sidecar CSV: matrix index, tours, final factor, wall seconds."""
    with open(path, "w") as fh:
        fh.write("matrix,tours,factor,wall_seconds\n")
        for index, tours, factor, wall in records:
            fh.write(f"{index},{tours},{factor:.6f},{wall:.3f}\n")
