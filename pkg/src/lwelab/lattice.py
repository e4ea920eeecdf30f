"""Integer lattice reduction: LLL and enumeration-based BKZ tours.

The engine keeps an exact integer basis and a floating Gram-Schmidt shadow.
Precision is a ladder: hardware doubles first, then arbitrary-precision
mantissas (106, 212, ... bits via mpmath).  A rung is abandoned when size
reduction cannot push every |mu_ij| below SIZE_REDUCTION_BOUND, the classic
symptom of a Gram-Schmidt shadow that has drifted from the exact basis.

BKZ blocks are solved by Fincke-Pohst enumeration without pruning (intended
for blocksizes up to ~24).  A found minimum is installed by applying a
unimodular transform to the block, so the basis never goes through a
linearly dependent intermediate state.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ReductionEngine",
    "PrecisionExhausted",
    "enumerate_shortest",
    "complete_unimodular",
]

SIZE_REDUCTION_BOUND = 0.75  # eta: tolerated |mu| after a size-reduction pass
ENUM_BLOCKSIZE_CAP = 24      # unpruned enumeration beyond this is hopeless
_SIZE_REDUCE_PASSES = 6
_WIDEN_BITS = 55             # switch int64 -> python ints past this magnitude


class _PrecisionFailure(Exception):
    """Internal: current mantissa cannot certify size reduction."""


class PrecisionExhausted(RuntimeError):
    """Raised when the precision ladder ran out of rungs."""


def _bit_length(x) -> int:
    return int(x).bit_length()


class _FloatGS:
    """Lazy float64 Gram-Schmidt state for an integer basis."""

    def __init__(self, basis: np.ndarray):
        self.basis = basis
        d = basis.shape[0]
        self.mu = np.zeros((d, d))
        self.bstar = np.zeros((d, basis.shape[1]))
        self.r = np.zeros(d)
        self.valid = 0

    def _row_float(self, i: int) -> np.ndarray:
        return np.asarray(self.basis[i], dtype=np.float64)

    def ensure(self, upto: int) -> None:
        for i in range(self.valid, upto):
            bf = self._row_float(i)
            if i:
                self.mu[i, :i] = (self.bstar[:i] @ bf) / self.r[:i]
                self.bstar[i] = bf - self.mu[i, :i] @ self.bstar[:i]
            else:
                self.bstar[0] = bf
            self.r[i] = float(self.bstar[i] @ self.bstar[i])
            if not np.isfinite(self.r[i]) or self.r[i] <= 0:
                raise _PrecisionFailure(f"non-positive GS norm at row {i}")
        self.valid = max(self.valid, upto)

    def invalidate(self, frm: int) -> None:
        self.valid = min(self.valid, frm)

    def refresh(self, k: int) -> None:
        self.invalidate(k)
        self.ensure(k + 1)

    def rounded_mu_row(self, k: int) -> list[int]:
        return [int(v) for v in np.rint(np.asarray(self.mu[k, :k], dtype=np.float64))]


class _MpGS(_FloatGS):
    """Gram-Schmidt with an arbitrary-precision mantissa (mpmath)."""

    def __init__(self, basis: np.ndarray, prec_bits: int):
        import mpmath

        self.mp = mpmath
        self.prec = prec_bits
        self.basis = basis
        d = basis.shape[0]
        zero = mpmath.mpf(0)
        self.mu = np.full((d, d), zero, dtype=object)
        self.bstar = np.full((d, basis.shape[1]), zero, dtype=object)
        self.r = np.full(d, zero, dtype=object)
        self.valid = 0

    def ensure(self, upto: int) -> None:
        with self.mp.workprec(self.prec):
            mpf = self.mp.mpf
            for i in range(self.valid, upto):
                bf = np.array([mpf(int(v)) for v in self.basis[i]], dtype=object)
                if i:
                    self.mu[i, :i] = (self.bstar[:i] @ bf) / self.r[:i]
                    self.bstar[i] = bf - self.mu[i, :i] @ self.bstar[:i]
                else:
                    self.bstar[0] = bf
                self.r[i] = (self.bstar[i] * self.bstar[i]).sum()
                if self.r[i] <= 0:
                    raise _PrecisionFailure(f"non-positive GS norm at row {i}")
        self.valid = max(self.valid, upto)

    def rounded_mu_row(self, k: int) -> list[int]:
        return [int(self.mp.nint(v)) for v in self.mu[k, :k]]


def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def complete_unimodular(x) -> np.ndarray:
    """Unimodular integer matrix whose first row is the primitive vector x."""
    x = [int(v) for v in x]
    n = len(x)
    u = np.eye(n, dtype=object)
    lead = x[0]
    for i in range(1, n):
        if x[i] == 0:
            continue
        g, cu, cv = _ext_gcd(lead, x[i])
        a, b = lead // g, x[i] // g
        # column op sends (lead, x_i) -> (g, 0); apply the inverse row op to u
        row0 = a * u[0] + b * u[i]
        rowi = -cv * u[0] + cu * u[i]
        u[0], u[i] = row0, rowi
        lead = g
    if abs(lead) != 1:
        raise ValueError(f"coefficient vector is not primitive (gcd={lead})")
    if lead == -1:
        u[0] = -u[0]
        u[1] = -u[1] if n > 1 else u[1]
    return u


def enumerate_shortest(mu, rr, radius):
    """Shortest nonzero coefficient vector in a projected block.

    Fincke-Pohst depth-first search with proximity-ordered zigzag and no
    pruning.  Returns (x, norm_sq) with norm_sq < radius, or (None, radius)
    when the first basis vector is already shortest within the radius.
    """
    mu = [list(map(float, row)) for row in np.asarray(mu)]
    rr = [float(v) for v in rr]
    n = len(rr)
    best_x = None
    best = float(radius)
    x = [0] * n
    trial = [0] * n
    base = [0] * n
    toward = [True] * n
    ctr = [0.0] * n
    acc = [0.0] * (n + 1)
    k = n - 1
    while k < n:
        d = x[k] - ctr[k]
        val = acc[k + 1] + d * d * rr[k]
        if val < best:
            if k == 0:
                if any(x):
                    best_x = list(x)
                    best = val
                # siblings at the innermost level
                trial[0] += 1
                x[0] = _zig(base[0], toward[0], trial[0])
            else:
                acc[k] = val
                k -= 1
                c = -sum(x[j] * mu[j][k] for j in range(k + 1, n))
                ctr[k] = c
                base[k] = round(c)
                toward[k] = c >= base[k]
                trial[k] = 0
                x[k] = base[k]
        else:
            k += 1
            if k >= n:
                break
            trial[k] += 1
            if k == n - 1:
                x[k] = trial[k]  # top level: nonnegative arm only
            else:
                x[k] = _zig(base[k], toward[k], trial[k])
    return best_x, best


def _zig(base: int, toward_plus: bool, t: int) -> int:
    mag = (t + 1) // 2
    if t % 2 == 1:
        return base + mag if toward_plus else base - mag
    return base - mag if toward_plus else base + mag


class ReductionEngine:
    """LLL / BKZ driver over an exact integer basis.

    The basis is reduced in place; `basis` returns the current rows.  All
    operations retry up the precision ladder on numeric failure and raise
    PrecisionExhausted when the last rung fails.
    """

    def __init__(self, basis, precision_bits=(53, 106, 212)):
        basis = np.asarray(basis)
        if basis.ndim != 2:
            raise ValueError("basis must be a 2-d integer matrix")
        self.precision_bits = tuple(precision_bits)
        if not self.precision_bits:
            raise ValueError("precision ladder must have at least one rung")
        absmax = max((_bit_length(v) for v in basis.flat), default=0)
        dtype = object if absmax >= _WIDEN_BITS else np.int64
        self.B = basis.astype(dtype)
        self.level = 0
        self.swaps = 0
        self._gs = self._new_gs()

    # -- precision ladder ---------------------------------------------------

    @property
    def precision(self) -> int:
        return self.precision_bits[self.level]

    def _new_gs(self):
        if self.precision == 53:
            return _FloatGS(self.B)
        return _MpGS(self.B, self.precision)

    def _escalate(self) -> None:
        if self.level + 1 >= len(self.precision_bits):
            raise PrecisionExhausted(
                f"precision ladder exhausted at {self.precision} bits"
            )
        self.level += 1
        self._gs = self._new_gs()

    def _run(self, fn):
        while True:
            try:
                return fn()
            except _PrecisionFailure:
                self._escalate()

    # -- integer row operations ----------------------------------------------

    def _widen(self) -> None:
        if self.B.dtype == object:
            return
        self.B = self.B.astype(object)
        self._gs.basis = self.B

    def _row_update(self, k: int, coeff: np.ndarray, rows: slice) -> None:
        if self.B.dtype != object:
            row_bits = max(_bit_length(int(np.abs(self.B[rows]).max(initial=0))), 1)
            m_bits = max(_bit_length(int(np.abs(coeff).max(initial=0))), 1)
            if row_bits + m_bits + _bit_length(self.B.shape[1]) >= _WIDEN_BITS + 6:
                self._widen()
        self.B[k] = self.B[k] - coeff @ self.B[rows]

    # -- LLL ------------------------------------------------------------------

    def lll(self, delta: float = 0.99, start: int = 0, max_iters: int | None = None):
        """Reduce the basis in place; returns the number of swaps performed.

        delta=1.0 is accepted (optimal Lovasz) but then termination rests on
        the iteration cap rather than the classical convergence argument.
        """
        if not 0.25 < delta <= 1.0:
            raise ValueError(f"delta must lie in (0.25, 1.0], got {delta}")
        d = self.B.shape[0]
        if max_iters is None:
            max_iters = 200 * d * d + 10_000
        return self._run(lambda: self._lll(delta, start, max_iters))

    def _lll(self, delta: float, start: int, max_iters: int) -> int:
        gs = self._gs
        d = self.B.shape[0]
        swaps = 0
        k = max(start, 1)
        iters = 0
        gs.ensure(min(1, d))
        while k < d and iters < max_iters:
            iters += 1
            self._size_reduce(k)
            if gs.r[k] >= (delta - float(gs.mu[k, k - 1]) ** 2) * gs.r[k - 1]:
                k += 1
            else:
                self.B[[k - 1, k]] = self.B[[k, k - 1]]
                gs.invalidate(k - 1)
                gs.ensure(k)
                swaps += 1
                k = max(k - 1, 1)
        self.swaps += swaps
        return swaps

    def _size_reduce(self, k: int) -> None:
        gs = self._gs
        gs.ensure(k + 1)
        # parallel rounding converges in a couple of passes on reduced rows
        for _ in range(_SIZE_REDUCE_PASSES):
            m = gs.rounded_mu_row(k)
            if not any(m):
                break
            self._row_update(k, self._coeff_vector(m), slice(0, k))
            gs.refresh(k)
        else:
            # rare oscillation: fall back to an exact sequential sweep
            for j in range(k - 1, -1, -1):
                mj = gs.rounded_mu_row(k)[j]
                if mj:
                    coeff = [0] * k
                    coeff[j] = mj
                    self._row_update(k, self._coeff_vector(coeff), slice(0, k))
                    gs.refresh(k)
        mu_row = np.abs(np.asarray(gs.mu[k, :k], dtype=np.float64))
        if mu_row.size and mu_row.max() > SIZE_REDUCTION_BOUND:
            raise _PrecisionFailure(
                f"|mu| = {mu_row.max():.3f} after size reduction at row {k}"
            )

    def _coeff_vector(self, m: list[int]) -> np.ndarray:
        if self.B.dtype == object:
            return np.array(m, dtype=object)
        return np.asarray(m, dtype=np.int64)

    # -- BKZ -----------------------------------------------------------------

    def bkz_tour(self, beta: int, delta: float = 0.99) -> int:
        """One BKZ tour: enumerate each block, insert improvements, re-LLL.

        Returns the number of blocks where a strictly shorter projected
        vector was found and installed.
        """
        if beta < 2:
            raise ValueError("blocksize must be >= 2")
        if beta > ENUM_BLOCKSIZE_CAP:
            raise ValueError(
                f"blocksize {beta} exceeds the unpruned enumeration cap "
                f"({ENUM_BLOCKSIZE_CAP})"
            )
        return self._run(lambda: self._bkz_tour(beta, delta))

    def _bkz_tour(self, beta: int, delta: float) -> int:
        d = self.B.shape[0]
        gs = self._gs
        inserted = 0
        self._lll(delta, 0, 200 * d * d + 10_000)
        for kappa in range(d - 1):
            end = min(kappa + beta, d)
            if end - kappa < 2:
                continue
            gs.ensure(end)
            mu_blk = np.asarray(gs.mu[kappa:end, kappa:end], dtype=np.float64)
            rr_blk = np.asarray(gs.r[kappa:end], dtype=np.float64)
            x, norm = enumerate_shortest(mu_blk, rr_blk, 0.9999 * rr_blk[0])
            if x is None:
                continue
            u = complete_unimodular(x)
            if self.B.dtype != object:
                blk_bits = _bit_length(int(np.abs(self.B[kappa:end]).max(initial=0)))
                u_bits = max(_bit_length(v) for v in u.flat)
                if blk_bits + u_bits + _bit_length(end - kappa) >= _WIDEN_BITS + 6:
                    self._widen()
                else:
                    u = u.astype(np.int64)
            self.B[kappa:end] = u @ self.B[kappa:end]
            gs.invalidate(kappa)
            inserted += 1
            self._lll(delta, kappa, 200 * d * d + 10_000)
        return inserted

    # -- views ----------------------------------------------------------------

    def basis(self) -> np.ndarray:
        return self.B.copy()

    def gs_norms(self) -> np.ndarray:
        """Squared Gram-Schmidt norms of the current basis."""
        self._run(lambda: self._gs.ensure(self.B.shape[0]))
        return np.asarray(self._gs.r, dtype=np.float64).copy()

    def is_size_reduced(self, eta: float = SIZE_REDUCTION_BOUND) -> bool:
        self._run(lambda: self._gs.ensure(self.B.shape[0]))
        mu = np.abs(np.asarray(self._gs.mu, dtype=np.float64))
        return bool((np.tril(mu, -1) <= eta).all())
