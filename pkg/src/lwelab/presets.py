"""Named parameter bundles: LWE modulus, reduction schedule, and tokenization.

Keyed by (n, log2 q).  The large-n bundles document the settings used at
full scale; their blocksizes exceed this package's unpruned enumeration cap,
so they load as configuration but are not runnable on a desk.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["ParamBundle", "PRESETS", "preset", "prev_prime", "modulus_for"]


@dataclass(frozen=True)
class ParamBundle:
    n: int
    logq: int
    q: int
    beta1: int
    delta1: float
    beta2: int
    delta2: float
    base: int
    bucket: int


_TABLE = [
    ParamBundle(256, 12, 3329, 35, 0.99, 40, 1.0, 417, 1),
    ParamBundle(256, 14, 11197, 35, 0.99, 40, 1.0, 1400, 1),
    ParamBundle(256, 16, 42899, 35, 0.99, 40, 1.0, 5363, 4),
    ParamBundle(256, 18, 222553, 35, 0.99, 40, 0.99, 27820, 16),
    ParamBundle(256, 20, 842779, 35, 0.99, 40, 0.99, 105348, 64),
    ParamBundle(350, 21, 1489513, 30, 0.96, 40, 0.99, 186190, 128),
    ParamBundle(350, 27, 94056013, 30, 0.96, 40, 0.99, 5878501, 4096),
    ParamBundle(512, 41, 2199023255531, 18, 0.93, 22, 0.96, 137438953471, 134217728),
]

PRESETS = {(b.n, b.logq): b for b in _TABLE}


def preset(n: int, logq: int) -> ParamBundle:
    try:
        return PRESETS[(n, logq)]
    except KeyError:
        raise KeyError(f"no preset for (n={n}, log2 q={logq})") from None


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(n: int) -> int:
    if n <= 2:
        raise ValueError("no prime below 2")
    c = n - 1 if n % 2 == 0 else n - 2
    if c < 2:
        return 2
    while c > 2 and not _is_prime(c):
        c -= 2
    return c


def modulus_for(n: int, logq: int) -> int:
    """Preset modulus for known (n, log2 q) pairs, else largest prime < 2^logq."""
    if (n, logq) in PRESETS:
        return PRESETS[(n, logq)].q
    return prev_prime(2**logq)
