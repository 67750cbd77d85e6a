from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import cache
from .errors import PrimeTableTooSmall

_DISK_THRESHOLD = 10**6


def sieve(limit: int) -> np.ndarray:
    """All primes <= limit as int64, by an odd-only Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit // 2 + 1, dtype=bool)  # index i <-> 2i+1
    is_p[0] = False
    r = int(limit**0.5) + 1
    for i in range(1, r // 2 + 1):
        if is_p[i]:
            p = 2 * i + 1
            is_p[p * p // 2 :: p] = False
    odd = 2 * np.nonzero(is_p)[0] + 1
    odd = odd[odd <= limit]
    return np.concatenate(([2], odd)).astype(np.int64)


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def upto(self, x: float) -> np.ndarray:
        """Primes <= x; raises if the table does not reach x."""
        if x > self.limit:
            raise PrimeTableTooSmall(f"table limit {self.limit} < requested {x}")
        return self.primes[: np.searchsorted(self.primes, x, side="right")]

    def between(self, lo: float, hi: float) -> np.ndarray:
        """Primes in (lo, hi]."""
        ps = self.upto(hi)
        return ps[np.searchsorted(ps, lo, side="right") :]


@lru_cache(maxsize=8)
def _table(limit: int) -> PrimeTable:
    if limit >= _DISK_THRESHOLD:
        key = cache.cache_key("primes", limit=limit)
        arr = cache.load_array(key)
        if arr is None:
            arr = sieve(limit)
            cache.store_array(key, arr)
        return PrimeTable(limit, arr)
    return PrimeTable(limit, sieve(limit))


def prime_table(limit: float) -> PrimeTable:
    """Shared read-only table of primes up to ``limit``.

    Limits are rounded up to a power of ten (minimum 1000) so that
    callers asking for nearby sizes share one table.
    """
    lim = max(1000, int(limit))
    rounded = 10 ** int(np.ceil(np.log10(lim) - 1e-12))
    return _table(int(rounded))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
