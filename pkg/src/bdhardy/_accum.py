"""Compensated (error-tracking) summation kernels.

All accumulation of long float64 vectors in this package goes through the
routines here.  Naive left-to-right summation of ~10^6 terms loses about
three digits; the kernels below keep the error at the few-ulp level while
staying in binary64 throughout (no extended precision, so results are
reproducible across platforms).

Scheme: the input is folded into a fixed number of lanes and each lane is
summed with the Neumaier variant of Kahan's algorithm (running sum plus a
running compensation that captures the low-order bits lost by each add).
The lane sums and lane compensations are then combined exactly with
``math.fsum``.  The total error is bounded by 2u * sum(|terms|) + O(n u^2),
independent of n for practical sizes.

For matrices, ``comp_gram`` accumulates A A^T over column chunks: each chunk
product is a BLAS call (internally blocked, error O(log chunk) ulps) and the
chunk results are combined with the same elementwise Neumaier compensation.
"""

from __future__ import annotations

import math

import numpy as np

# Below this size plain fsum (exact) is cheaper than the lane machinery.
_FSUM_CUTOFF = 2048
_LANES = 1024


def comp_sum(x) -> float:
    """Compensated sum of a 1-D float64 array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.size
    if n == 0:
        return 0.0
    if n <= _FSUM_CUTOFF:
        return math.fsum(x)
    m = -(-n // _LANES)
    buf = np.zeros(m * _LANES)
    buf[:n] = x
    buf = buf.reshape(m, _LANES)
    s = np.zeros(_LANES)
    c = np.zeros(_LANES)
    for row in buf:
        t = s + row
        # Neumaier branch: add the bits lost by whichever addend was smaller.
        c += np.where(np.abs(s) >= np.abs(row), (s - t) + row, (row - t) + s)
        s = t
    return math.fsum(s) + math.fsum(c)


def comp_dot(a, b) -> float:
    """Compensated dot product.

    The elementwise products are formed in binary64 (one rounding each,
    which a pure summation scheme cannot see); the summation itself is
    compensated.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return comp_sum(a * b)


def comp_dot_w(a, b, w) -> float:
    """Compensated weighted dot product sum(w * a * b)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    return comp_sum(w * a * b)


def comp_gram(a: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """Compensated Gram matrix A A^T accumulated over column chunks.

    Each chunk product runs through BLAS; compensation is applied
    elementwise across chunks, so the cross-chunk accumulation error is
    O(u) instead of O(n_chunks * u).
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    m = a.shape[0]
    s = np.zeros((m, m))
    c = np.zeros((m, m))
    for j0 in range(0, a.shape[1], chunk):
        block = a[:, j0:j0 + chunk]
        p = block @ block.T
        t = s + p
        c += np.where(np.abs(s) >= np.abs(p), (s - t) + p, (p - t) + s)
        s = t
    return s + c


class NeumaierSum:
    """Scalar running compensated sum, for sequential recurrences."""

    __slots__ = ("s", "c")

    def __init__(self, value: float = 0.0):
        self.s = float(value)
        self.c = 0.0

    def add(self, x: float) -> float:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t
        return self.s + self.c

    @property
    def value(self) -> float:
        return self.s + self.c
