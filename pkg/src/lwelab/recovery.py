"""Distinguisher-based secret recovery driven by a prediction oracle.

The one-bit distinguisher scores each coordinate i by how much oracle
predictions move when a held-out test vector is perturbed along e_i: if
s_i = 0 the noisy inner product is unchanged, so a near-zero score marks a
zero bit.  Nonzero bits come out as the top-h scores.  For ternary secrets
a second, two-bit stage classifies the nonzero coordinates into equal /
opposite sign classes using swap and +-c probes, which pins the secret down
to one sign flip; both candidates go through residual verification.  An
EMD variant scores with earth-mover's distances between predicted token
distributions instead of circular distances between point predictions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import SampleSet, Secret, SecretDist, verify_secret
from .rng import content_rng, derive_seed

__all__ = [
    "RecoveryStatus",
    "BitScores",
    "TwoBitResult",
    "RecoveryResult",
    "OracleAborted",
    "circ_diff",
    "emd_1d",
    "one_bit_scores",
    "emd_distinguisher_scores",
    "two_bit_classes",
    "top_support",
    "recover",
    "flat_score_pvalue",
]

DEFAULT_TEST_VECTORS = 128
TWO_BIT_TEST_VECTORS = 64
TIE_TOLERANCE = 0.05  # fraction of the median agreement treated as a tie


class RecoveryStatus(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    FAILURE = "failure"


@dataclass
class BitScores:
    scores: np.ndarray
    metric: str  # "circ" or "emd"
    test_vectors: int


@dataclass
class TwoBitResult:
    class_a: np.ndarray
    class_b: np.ndarray
    s_plus: Secret
    s_minus: Secret
    low_confidence: bool
    agreements: dict


@dataclass
class RecoveryResult:
    status: RecoveryStatus
    guess: Secret | None
    h_used: int | None
    diagnostics: dict = field(default_factory=dict)


class OracleAborted(RuntimeError):
    """Oracle failed mid-scan; `partial_scores` holds what was computed."""

    def __init__(self, message: str, partial_scores: np.ndarray, failed_at: int):
        super().__init__(message)
        self.partial_scores = partial_scores
        self.failed_at = failed_at


def circ_diff(u, v, q: int):
    """Circular distance mod q between decoded predictions."""
    d = np.abs(np.asarray(u, dtype=np.int64) - np.asarray(v, dtype=np.int64))
    return np.minimum(d, q - d)


def emd_1d(p, r) -> float:
    """Earth mover's distance between two 1-d histograms, unit ground distance.

    For point masses at tokens t1, t2 this equals |t1 - t2|.
    """
    diff = np.asarray(p, dtype=np.float64) - np.asarray(r, dtype=np.float64)
    return float(np.abs(np.cumsum(diff)).sum())


def _emd_rows(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    return np.abs(np.cumsum(p - r, axis=1)).sum(axis=1)


def _test_vectors(heldout: SampleSet, count: int) -> np.ndarray:
    if len(heldout) < count:
        warnings.warn(
            f"only {len(heldout)} held-out vectors available, wanted {count}",
            stacklevel=3,
        )
        return heldout.a
    return heldout.a[:count]


def _shift_values(seed: int, vectors: np.ndarray, q: int) -> np.ndarray:
    """One K per test vector, uniform over the integers in (0.3q, 0.7q).

    K is derived from the vector's content, so scores are exactly invariant
    under reordering of the held-out set.
    """
    low = int(0.3 * q) + 1
    high = -(-int(7 * q) // 10)  # ceil(0.7q); integers drawn in [low, high)
    high = max(high, low + 1)
    ks = np.empty(len(vectors), dtype=np.int64)
    for t, row in enumerate(vectors):
        ks[t] = int(content_rng(seed, row.tobytes()).integers(low, high))
    return ks


def one_bit_scores(
    oracle, heldout: SampleSet, seed: int = 0, test_count: int = DEFAULT_TEST_VECTORS
) -> BitScores:
    """Sum over test vectors of circ_diff(f(a), f(a + K e_i)) per coordinate i."""
    q = oracle.q
    vectors = _test_vectors(heldout, test_count)
    ks = _shift_values(derive_seed(seed, "one-bit-k"), vectors, q)
    scores = np.zeros(oracle.n, dtype=np.float64)
    base = oracle.query_batch(vectors)
    for i in range(oracle.n):
        perturbed = vectors.copy()
        perturbed[:, i] = (perturbed[:, i] + ks) % q
        try:
            preds = oracle.query_batch(perturbed)
        except Exception as exc:  # noqa: BLE001 - propagate with partial scores
            raise OracleAborted(
                f"oracle failed at coordinate {i}: {exc}", scores[:i].copy(), i
            ) from exc
        scores[i] = float(circ_diff(base, preds, q).sum())
    return BitScores(scores=scores, metric="circ", test_vectors=len(vectors))


def emd_distinguisher_scores(
    oracle, heldout: SampleSet, seed: int = 0, test_count: int = DEFAULT_TEST_VECTORS
) -> BitScores:
    """Sum of squared EMDs between predicted token distributions.

    Falls back to one_bit_scores when the oracle has no distribution support
    (recorded in the metric field).
    """
    if not getattr(oracle, "supports_dist", False):
        return one_bit_scores(oracle, heldout, seed, test_count)
    q = oracle.q
    vectors = _test_vectors(heldout, test_count)
    ks = _shift_values(derive_seed(seed, "one-bit-k"), vectors, q)
    scores = np.zeros(oracle.n, dtype=np.float64)
    base = oracle.dist_batch(vectors)
    for i in range(oracle.n):
        perturbed = vectors.copy()
        perturbed[:, i] = (perturbed[:, i] + ks) % q
        try:
            dists = oracle.dist_batch(perturbed)
        except Exception as exc:  # noqa: BLE001
            raise OracleAborted(
                f"oracle failed at coordinate {i}: {exc}", scores[:i].copy(), i
            ) from exc
        scores[i] = float((_emd_rows(base, dists) ** 2).sum())
    return BitScores(scores=scores, metric="emd", test_vectors=len(vectors))


def top_support(scores: np.ndarray, h: int) -> tuple[np.ndarray, bool]:
    """Indices of the h largest scores; ties broken by ascending index.

    Returns (support, had_ties) where had_ties flags an exact score tie at
    the cut boundary.
    """
    order = np.lexsort((np.arange(len(scores)), -scores))
    support = np.sort(order[:h])
    had_ties = h < len(scores) and scores[order[h - 1]] == scores[order[h]]
    return support, bool(had_ties)


def _probe_score(oracle, vectors: np.ndarray, base, probed: np.ndarray, q: int) -> float:
    if getattr(oracle, "supports_dist", False):
        return float((_emd_rows(base, oracle.dist_batch(probed)) ** 2).sum())
    return float(circ_diff(base, oracle.query_batch(probed), q).sum())


def two_bit_classes(
    oracle,
    heldout: SampleSet,
    support,
    seed: int = 0,
    test_count: int = TWO_BIT_TEST_VECTORS,
) -> TwoBitResult:
    """Partition the support into equal-sign classes via swap and +-c probes.

    If s_i = s_j, swapping coordinates a_i, a_j (or shifting them by +c, -c)
    leaves a.s unchanged, so predictions barely move; if s_i = -s_j they move
    a lot.  The agreement score is minus the mean prediction movement over
    all probes.  The cut between "barely" and "a lot" is self-calibrated:
    shifting the anchor coordinate alone must move predictions (its secret
    bit is nonzero), and a pair whose movement stays under half that
    single-coordinate scale is classified same-sign.  Returns both candidate
    ternary secrets (s_minus = -s_plus).
    """
    support = np.asarray(sorted(int(i) for i in support))
    if support.size == 0:
        raise ValueError("support must contain at least one index")
    n, q = oracle.n, oracle.q
    vectors = _test_vectors(heldout, test_count)
    base = (
        oracle.dist_batch(vectors)
        if getattr(oracle, "supports_dist", False)
        else oracle.query_batch(vectors)
    )
    shifts = (q // 7, q // 3, 2 * q // 5)
    anchor = int(support[0])
    # calibration: movement when only the anchor coordinate is shifted
    calibration = 0.0
    for c in shifts:
        probed = vectors.copy()
        probed[:, anchor] = (probed[:, anchor] + c) % q
        calibration += _probe_score(oracle, vectors, base, probed, q)
    calibration /= len(shifts)
    threshold = calibration / 2.0
    agreements: dict = {}
    for j in support[1:]:
        j = int(j)
        total = 0.0
        swapped = vectors.copy()
        swapped[:, [anchor, j]] = swapped[:, [j, anchor]]
        total += _probe_score(oracle, vectors, base, swapped, q)
        for c in shifts:
            shifted = vectors.copy()
            shifted[:, anchor] = (shifted[:, anchor] + c) % q
            shifted[:, j] = (shifted[:, j] - c) % q
            total += _probe_score(oracle, vectors, base, shifted, q)
        agreements[j] = -total / (1 + len(shifts))
    entries = np.zeros(n, dtype=np.int64)
    entries[anchor] = 1
    low_confidence = False
    for j, agr in agreements.items():
        entries[j] = 1 if -agr < threshold else -1
        if threshold > 0 and abs(-agr - threshold) <= TIE_TOLERANCE * threshold:
            low_confidence = True
    class_a = np.flatnonzero(entries == 1)
    class_b = np.flatnonzero(entries == -1)
    s_plus = Secret(SecretDist.TERNARY, entries)
    s_minus = Secret(SecretDist.TERNARY, -entries)
    return TwoBitResult(
        class_a=class_a,
        class_b=class_b,
        s_plus=s_plus,
        s_minus=s_minus,
        low_confidence=low_confidence,
        agreements=agreements,
    )


def recover(
    oracle,
    heldout: SampleSet,
    originals: SampleSet,
    dist: SecretDist,
    h_range=None,
    seed: int = 0,
    reference_secret: Secret | None = None,
) -> RecoveryResult:
    """Score once, then sweep candidate h values and verify each guess.

    Binary: top-h indicator vector, verified on the originals.  Ternary:
    top-h support, two-bit sign classes, both sign candidates verified.
    Gaussian: partial recovery only; the top-h support is validated against
    `reference_secret` (lab mode).  FULL is returned only for a guess that
    passed verify_secret.
    """
    dist = SecretDist(dist)
    n = oracle.n
    if h_range is None:
        h_range = range(1, max(1, -(-n // 20)) + 1)
    if dist is SecretDist.GAUSSIAN and reference_secret is None:
        raise ValueError(
            "gaussian recovery is partial-only and needs reference_secret "
            "to validate the support (lab mode)"
        )
    bit_scores = (
        emd_distinguisher_scores(oracle, heldout, seed)
        if getattr(oracle, "supports_dist", False)
        else one_bit_scores(oracle, heldout, seed)
    )
    scores = bit_scores.scores
    diagnostics: dict = {
        "scores": scores,
        "metric": bit_scores.metric,
        "tried_h": [],
        "ties": [],
        "verify_attempts": 0,
    }
    if reference_secret is not None:
        ref_support, _ = top_support(scores, reference_secret.h)
        diagnostics["support_match"] = bool(
            np.array_equal(ref_support, reference_secret.support)
        )
    for h in h_range:
        if not 0 < h <= n:
            continue
        diagnostics["tried_h"].append(h)
        support, tied = top_support(scores, h)
        if tied:
            diagnostics["ties"].append(h)
        if dist is SecretDist.BINARY:
            entries = np.zeros(n, dtype=np.int64)
            entries[support] = 1
            guess = Secret(SecretDist.BINARY, entries)
            diagnostics["verify_attempts"] += 1
            if verify_secret(guess, originals).accepted:
                return RecoveryResult(RecoveryStatus.FULL, guess, h, diagnostics)
        elif dist is SecretDist.TERNARY:
            result = two_bit_classes(oracle, heldout, support, seed)
            diagnostics["two_bit_low_confidence"] = result.low_confidence
            for guess in (result.s_plus, result.s_minus):
                diagnostics["verify_attempts"] += 1
                if verify_secret(guess, originals).accepted:
                    diagnostics["sign_classes"] = (result.class_a, result.class_b)
                    return RecoveryResult(RecoveryStatus.FULL, guess, h, diagnostics)
        else:  # gaussian: partial recovery (full recovery is out of scope)
            if h == reference_secret.h and np.array_equal(
                support, reference_secret.support
            ):
                diagnostics["support"] = support
                return RecoveryResult(RecoveryStatus.PARTIAL, None, h, diagnostics)
    return RecoveryResult(RecoveryStatus.FAILURE, None, None, diagnostics)


def flat_score_pvalue(scores: np.ndarray, q: int, test_vectors: int) -> float:
    """Chi-square p-value that circ-metric scores match the uniform-oracle null.

    Under a fully confused oracle every prediction is uniform, so each score
    is a sum of `test_vectors` iid circular distances between two uniforms
    mod q.  A high p-value means no coordinate is separable.
    """
    from scipy import stats

    scores = np.asarray(scores, dtype=np.float64)
    # exact moments of circ_diff(U, V) for iid uniforms on [0, q)
    ks = np.arange(q // 2 + 1, dtype=np.float64)
    weights = np.full_like(ks, 2.0 / q)
    weights[0] = 1.0 / q
    if q % 2 == 0:
        weights[-1] = 1.0 / q
    mean1 = float(ks @ weights)
    var1 = float((ks - mean1) ** 2 @ weights)
    stat = float(((scores - test_vectors * mean1) ** 2).sum() / (test_vectors * var1))
    return float(stats.chi2.sf(stat, df=len(scores)))
