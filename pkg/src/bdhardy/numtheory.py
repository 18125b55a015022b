"""Sieved arithmetic functions and partial sums.

Provides the Mobius function, divisor counts, harmonic numbers and the two
Mertens-type partial sums sum mu(k)/k and sum mu(k) log k / k whose limits
(0 and -1, equivalent forms of the Prime Number Theorem) drive the
Mobius-series experiments.  Everything is sieved once into an immutable
:class:`NTTables` and queried in O(1).

sigma(n) denotes the *number of divisors* throughout (named divisor_count
to avoid the classical sum-of-divisors ambiguity).

Two facts worth calling out:

* harmonic numbers are exact to the ulp level for every n: a compensated
  prefix below a small crossover, the Euler-Maclaurin expansion above it
  (the omitted term is < 1/(252 n^6), far below one ulp at the crossover);
* tail sums sum_{j>n} sigma(j)^2/j^2 are computed exactly as
  zeta(2)^4/zeta(4) - partial = 5 pi^4/72 - partial, with no cutoff error.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._accum import NeumaierSum, comp_sum

EULER_GAMMA = float(np.euler_gamma)

#: Exact value of sum_{j>=1} sigma(j)^2 / j^2 = zeta(2)^4 / zeta(4).
DIVISOR_SQ_OVER_SQ_TOTAL = 5.0 * math.pi ** 4 / 72.0

_SIEVE_LIMIT = 10 ** 8
_HARMONIC_EXACT_CUTOFF = 2048

_CACHE_MAGIC = b"BDHNTT01"


def divides_indicator(k: int, n: int) -> int:
    """[k|n]: 1 if k divides n else 0; 0 is a multiple of every k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    return 1 if n % k == 0 else 0


def harmonic_numbers(m: int) -> np.ndarray:
    """H(0..m) with H(0) = 0, exact to ~1 ulp for every n.

    Exact compensated prefix for n < 2048; Euler-Maclaurin
    log n + gamma + 1/(2n) - 1/(12 n^2) + 1/(120 n^4) beyond.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    h = np.empty(m + 1)
    h[0] = 0.0
    k = min(m, _HARMONIC_EXACT_CUTOFF)
    acc = NeumaierSum()
    for n in range(1, k + 1):
        h[n] = acc.add(1.0 / n)
    if m > k:
        n = np.arange(k + 1, m + 1, dtype=np.float64)
        inv2 = 1.0 / (n * n)
        h[k + 1:] = (np.log(n) + EULER_GAMMA
                     + 0.5 / n - inv2 / 12.0 + inv2 * inv2 / 120.0)
    return h


def harmonic_asymptotic_residual(n: int) -> float:
    """H(n) - log n - gamma; always in (0, 1/n] and decreasing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= _HARMONIC_EXACT_CUTOFF:
        acc = NeumaierSum()
        for j in range(1, n + 1):
            acc.add(1.0 / j)
        return acc.value - math.log(n) - EULER_GAMMA
    # Euler-Maclaurin form: no cancellation for large n.
    inv2 = 1.0 / (n * n)
    return 0.5 / n - inv2 / 12.0 + inv2 * inv2 / 120.0


@dataclass(frozen=True)
class NTTables:
    """Immutable sieve output; all arrays indexed 1..limit (index 0 unused)."""

    limit: int
    mobius: np.ndarray               # int8
    divisor_count: np.ndarray        # int32
    harmonic: np.ndarray             # float64, H(0..limit)
    mertens_over_k: np.ndarray       # float64, sum_{k<=n} mu(k)/k
    mertens_logk_over_k: np.ndarray  # float64, sum_{k<=n} mu(k) log k / k

    def __post_init__(self):
        for name in ("mobius", "divisor_count", "harmonic",
                     "mertens_over_k", "mertens_logk_over_k"):
            getattr(self, name).setflags(write=False)

    # -- cache file (documented little-endian layout) --------------------
    # bytes 0..7   magic "BDHNTT01"
    # bytes 8..15  uint64 little-endian limit M
    # then five arrays of length M+1 back to back:
    #   mobius       int8
    #   divisor_count  int32 LE
    #   harmonic        float64 LE
    #   mertens_over_k  float64 LE
    #   mertens_logk_over_k float64 LE

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(np.uint64(self.limit).newbyteorder("<").tobytes())
            self.mobius.astype("<i1").tofile(fh)
            self.divisor_count.astype("<i4").tofile(fh)
            self.harmonic.astype("<f8").tofile(fh)
            self.mertens_over_k.astype("<f8").tofile(fh)
            self.mertens_logk_over_k.astype("<f8").tofile(fh)

    @classmethod
    def load(cls, path) -> "NTTables":
        with open(path, "rb") as fh:
            if fh.read(8) != _CACHE_MAGIC:
                raise ValueError("not an NTTables cache file")
            m = int(np.frombuffer(fh.read(8), dtype="<u8")[0])
            cnt = m + 1
            mob = np.fromfile(fh, dtype="<i1", count=cnt).astype(np.int8)
            dc = np.fromfile(fh, dtype="<i4", count=cnt).astype(np.int32)
            har = np.fromfile(fh, dtype="<f8", count=cnt)
            m1 = np.fromfile(fh, dtype="<f8", count=cnt)
            m2 = np.fromfile(fh, dtype="<f8", count=cnt)
        if m2.size != cnt:
            raise ValueError("truncated NTTables cache file")
        return cls(m, mob, dc, har, m1, m2)

    def to_csv(self, max_rows: int | None = None) -> str:
        m = self.limit if max_rows is None else min(self.limit, max_rows)
        lines = ["n,mobius,divisor_count,harmonic,mertens_over_k,mertens_logk_over_k"]
        for n in range(1, m + 1):
            lines.append(f"{n},{self.mobius[n]},{self.divisor_count[n]},"
                         f"{self.harmonic[n]!r},{self.mertens_over_k[n]!r},"
                         f"{self.mertens_logk_over_k[n]!r}")
        return "\n".join(lines) + "\n"


def _primes_upto(m: int) -> np.ndarray:
    isp = np.ones(m + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, math.isqrt(m) + 1):
        if isp[p]:
            isp[p * p::p] = False
    return np.nonzero(isp)[0]


def _mobius_range(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """mu on [lo, hi) given all primes <= sqrt(hi-1), segment-local.

    Each prime p <= sqrt(hi) flips the sign once on its multiples and
    zeroes multiples of p^2; a cofactor left > 1 afterwards is a single
    prime > sqrt(hi) and flips the sign once more.
    """
    n = hi - lo
    mu = np.ones(n, dtype=np.int8)
    rem = np.arange(lo, hi, dtype=np.int64)
    if lo == 0:
        rem[0] = 1  # keep 0 out of the factor loop; mu(0) is set below
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        idx = np.arange((-lo) % p, n, p)
        if idx.size == 0:
            continue
        mu[idx] *= -1
        mu[(-lo) % (p * p)::p * p] = 0
        r = rem[idx]
        while True:
            q, rmod = np.divmod(r, p)
            sel = rmod == 0
            if not sel.any():
                break
            r[sel] = q[sel]
        rem[idx] = r
    mu[rem > 1] *= -1
    if lo == 0:
        mu[0] = 0
    return mu


def _divisor_count_range(lo: int, hi: int) -> np.ndarray:
    """Divisor counts on [lo, hi): pair divisors d <= sqrt(n)."""
    n = hi - lo
    dc = np.zeros(n, dtype=np.int32)
    for d in range(1, math.isqrt(max(hi - 1, 0)) + 1):
        first = max(d * d, ((lo + d - 1) // d) * d)
        if first >= hi:
            continue
        dc[first - lo::d] += 2
        sq = d * d
        if lo <= sq < hi:
            dc[sq - lo] -= 1
    if lo == 0:
        dc[0] = 0
    return dc


def sieve(limit: int, threads: int = 1) -> NTTables:
    """Build all tables up to ``limit``.

    ``threads > 1`` sieves mu and sigma in independent segments (the
    cumulative arrays are always a single deterministic pass); the output
    is bit-identical to the single-threaded result.
    """
    if not (1 <= limit <= _SIEVE_LIMIT):
        raise ValueError(f"limit must be in [1, {_SIEVE_LIMIT}]")
    primes = _primes_upto(math.isqrt(limit) + 1)
    bounds = [(0, limit + 1)]
    if threads > 1:
        seg = max(1 << 16, (limit + threads) // threads)
        bounds = [(lo, min(lo + seg, limit + 1))
                  for lo in range(0, limit + 1, seg)]
        with ThreadPoolExecutor(max_workers=threads) as ex:
            mob_parts = list(ex.map(lambda b: _mobius_range(b[0], b[1], primes), bounds))
            dc_parts = list(ex.map(lambda b: _divisor_count_range(*b), bounds))
        mobius = np.concatenate(mob_parts)
        divisor_count = np.concatenate(dc_parts)
    else:
        mobius = _mobius_range(0, limit + 1, primes)
        divisor_count = _divisor_count_range(0, limit + 1)

    harmonic = harmonic_numbers(limit)

    k = np.arange(limit + 1, dtype=np.float64)
    k[0] = 1.0
    m1_terms = mobius / k
    m1_terms[0] = 0.0
    logk = np.zeros(limit + 1)
    if limit >= 1:
        logk[1:] = np.log(np.arange(1, limit + 1, dtype=np.float64))
    m2_terms = mobius * logk / k
    m2_terms[0] = 0.0
    return NTTables(limit, mobius, divisor_count, harmonic,
                    np.cumsum(m1_terms), np.cumsum(m2_terms))


@lru_cache(maxsize=4)
def cached_sieve(limit: int, cache_dir: str | None = None) -> NTTables:
    """sieve() with in-process memoization and optional on-disk cache.

    ``cache_dir`` defaults to the BDHARDY_CACHE_DIR environment variable.
    """
    if cache_dir is None:
        cache_dir = os.environ.get("BDHARDY_CACHE_DIR")
    if cache_dir:
        path = Path(cache_dir) / f"nttables_{limit}.bin"
        if path.exists():
            tables = NTTables.load(path)
            if tables.limit == limit:
                return tables
        tables = sieve(limit)
        path.parent.mkdir(parents=True, exist_ok=True)
        tables.save(path)
        return tables
    return sieve(limit)


def mertens_limits_check(tables: NTTables) -> tuple[float, float]:
    """Partial sums (sum mu(k)/k, sum mu(k) log k / k) at n = limit.

    The limits are 0 and -1; convergence is slow and no rate is asserted.
    """
    return (float(tables.mertens_over_k[tables.limit]),
            float(tables.mertens_logk_over_k[tables.limit]))


def divisor_sq_tail(tables: NTTables, n: int) -> float:
    """Exact sum_{j>n} sigma(j)^2 / j^2 via the zeta closed form."""
    if not (0 <= n <= tables.limit):
        raise ValueError("n must be within the sieved range")
    if n == 0:
        return DIVISOR_SQ_OVER_SQ_TOTAL
    j = np.arange(1, n + 1, dtype=np.float64)
    partial = comp_sum((tables.divisor_count[1:n + 1] / j) ** 2)
    return DIVISOR_SQ_OVER_SQ_TOTAL - partial


def mobius_divisor_sums(tables: NTTables, n: int, size: int) -> np.ndarray:
    """D[j] = sum of mu(d) over divisors d <= n of j, for 0 <= j < size.

    D[0] = 0 by convention.  This is the per-coefficient kernel of the
    truncated Mobius combination: O(size log n) sieve instead of summing
    n dense vectors.
    """
    if n > tables.limit:
        raise ValueError("n exceeds the sieved range")
    d_arr = np.zeros(size, dtype=np.int64)
    mob = tables.mobius
    for d in range(1, min(n, size - 1) + 1):
        m = int(mob[d])
        if m:
            d_arr[d::d] += m
    d_arr[0] = 0
    return d_arr
