"""Embedding into the Periodic Dilation Completeness Problem.

L^2(0,1) is represented purely in the orthonormal sine basis
e_k(x) = sqrt(2) sin(pi k x); pointwise sampling is an export convenience,
never the computational representation.  The unitary U maps z^k to e_k on
the subspace H^2_0 of Hardy functions vanishing at 0, and

    V = U P (I - S) : H^2 -> L^2(0,1)

(with P the projection dropping the constant term) carries cyclic vectors
of the weighted composition semigroup {W_n} to functions whose dilates
phi(nx) span L^2(0,1) ("PDCP functions").  Dilation acts on sine
coefficients as the index map m -> m/n, conjugate to f(z) -> f(z^n).

``wintner_fs`` builds the classical PDCP family f_s(x) = sum k^{-s} e_k(x)
(s > 1/2); ``range_exclusion_witness`` demonstrates numerically why f_1
escapes the range of V: its preimage candidates alpha + log(1-z) have
Abel means at 1 diverging like log(1-r), while everything in (I-S)H^2 has
radial boundary value 0 there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accum import comp_dot, comp_gram, comp_sum
from . import bdcriterion as bd
from . import hardyops as ho
from . import seriescore as sc
from .seriescore import CoeffSeq, Space

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SineSeq:
    """Coefficients c_1..c_{N_s} of sum c_k sqrt(2) sin(pi k x) on (0,1).

    The basis is orthonormal, so the norm is the plain l^2 norm of the
    coefficients.  Entry k lives at array position k-1.
    """

    coeffs: np.ndarray
    trunc_bound: float = 0.0

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 1:
            raise ValueError("SineSeq needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "trunc_bound", float(self.trunc_bound))

    @property
    def n(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return math.sqrt(comp_sum(self.coeffs * self.coeffs))


def map_u(f: CoeffSeq) -> SineSeq:
    """U: z^k -> e_k on H^2_0; a pure relabeling, hence unitary."""
    if f.space is not Space.H2:
        raise sc.SpaceMismatchError("U expects an H2 sequence")
    if f.coeffs[0] != 0.0:
        raise ValueError("U is defined on H^2_0: constant coefficient must vanish")
    if f.n < 2:
        raise ValueError("need at least one nonconstant coefficient")
    return SineSeq(f.coeffs[1:], f.trunc_bound)


def map_v(f: CoeffSeq) -> SineSeq:
    """V = U P (I-S): sine coefficient m is a_m - a_{m-1} (constant dropped)."""
    if f.space is not Space.H2:
        raise sc.SpaceMismatchError("V expects an H2 sequence")
    if f.n < 2:
        f = sc.pad_to(f, 2)
    out = f.coeffs[1:] - f.coeffs[:-1]
    return SineSeq(out, 2.0 * f.trunc_bound + abs(float(f.coeffs[-1])))


def dilate(n: int, s: SineSeq) -> SineSeq:
    """phi(x) -> phi(nx) on sine coefficients: entry m of the output is
    entry m/n of the input when n | m, else 0 (conjugate of f -> f(z^n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return s
    out = np.zeros(s.n)
    src = s.coeffs[:s.n // n]
    out[n - 1::n] = src
    return SineSeq(out, s.trunc_bound)


def wintner_fs(s: float, n_s: int) -> SineSeq:
    """f_s(x) = sum_k k^{-s} sqrt(2) sin(pi k x); square-summable iff s > 1/2.

    The dropped tail has sum_{k>N} k^{-2s} <= N^{1-2s}/(2s-1).
    """
    if s <= 0.5:
        raise ValueError("need s > 1/2 for square-summable coefficients")
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    k = np.arange(1, n_s + 1, dtype=np.float64)
    tail = math.sqrt(n_s ** (1.0 - 2.0 * s) / (2.0 * s - 1.0))
    return SineSeq(k ** (-s), tail)


def span_distance_l2(target: SineSeq, generator: SineSeq, n_max: int,
                     ridge_floor: float | None = None) -> bd.DistanceReport:
    """Least-squares distance from target to span{dilate(n, generator) : n <= n_max},
    using the same compensated Gram assembly and ridge policy as the H^2
    distances."""
    import time
    t0 = time.perf_counter()
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if generator.norm() == 0.0:
        raise ValueError("generator must be nonzero")
    size = max(target.n, generator.n)
    tc = np.zeros(size)
    tc[:target.n] = target.coeffs
    gen = np.zeros(size)
    gen[:generator.n] = generator.coeffs
    gen_seq = SineSeq(gen)
    rows = np.vstack([dilate(n, gen_seq).coeffs for n in range(1, n_max + 1)])
    gram = comp_gram(rows)
    gram = 0.5 * (gram + gram.T)
    b = np.array([comp_dot(rows[i], tc) for i in range(n_max)])
    t2 = comp_sum(tc * tc)
    eps0 = (ridge_floor if ridge_floor is not None
            else bd.RIDGE_FLOOR_FACTOR * float(np.trace(gram)) / n_max)
    x, eps, cond = bd.ridge_solve_spd(gram, b, eps0)
    d2 = t2 - float(x @ b)
    clamped = d2 < 0
    d2 = max(d2, 0.0)
    trunc = float(np.sum(np.abs(x))) * generator.trunc_bound + target.trunc_bound
    summary = {"explained_norm2": float(x @ b), "clamped": clamped,
               "solution_norm": float(np.linalg.norm(x)),
               "max_coeff": float(np.max(np.abs(x))) if x.size else 0.0}
    return bd.DistanceReport(n_max, size, math.sqrt(d2), summary,
                             "cholesky+ridge", eps, cond, trunc,
                             time.perf_counter() - t0)


def sample_odd_periodic(s: SineSeq, grid: int) -> tuple[np.ndarray, np.ndarray]:
    """Values of the odd 2-periodic extension at grid midpoints over (0, 2).

    The sine basis makes the odd 2-periodic extension automatic; this is
    an export convenience only.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    x = (np.arange(grid) + 0.5) * (2.0 / grid)
    vals = np.zeros(grid)
    k = np.arange(1, s.n + 1, dtype=np.float64)
    chunk = max(1, 2 ** 22 // max(s.n, 1))
    for i0 in range(0, grid, chunk):
        xs = x[i0:i0 + chunk, None]
        vals[i0:i0 + chunk] = np.sin(math.pi * xs * k[None, :]) @ s.coeffs
    return x, SQRT2 * vals


@dataclass(frozen=True)
class RangeExclusionReport:
    """Abel-mean witnesses at zeta = 1 along radii r_j = 1 - 2^{-j}.

    abel_log: means of log(1-z) — decrease without bound, consecutive
    differences -> -log 2 (so no radial limit exists at 1).
    abel_ims_h2: means of (I-S)h_2 -> 0.
    abel_factored_poly: means of (I-S)p for a polynomial p -> 0 (the (1-z)
    factor vanishes at 1).
    """
    radii_exponents: tuple
    abel_log: tuple
    abel_ims_h2: tuple
    abel_factored_poly: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {"radii_exponents": list(self.radii_exponents),
                "abel_log": list(self.abel_log),
                "abel_ims_h2": list(self.abel_ims_h2),
                "abel_factored_poly": list(self.abel_factored_poly),
                "pass": self.passed}


def range_exclusion_witness(n: int = 2 ** 20, j_lo: int = 4, j_hi: int = 14,
                            seed: int = 0) -> RangeExclusionReport:
    """Numerical mechanism behind "f_1 is not in the range of V".

    Candidates mapped to f_1 would have the form alpha + log(1-z); but
    log(1-z) has no radial limit at 1 (the Abel means run off like
    log(1-r), dropping by log 2 at each dyadic radius), while every member
    of (I-S)H^2 has radial boundary value 0 at 1.
    """
    ell = ho.named_function("L_log1mz", n)
    ims_h2 = ho.ims_hk_coeffs(2, n)
    rng = np.random.default_rng(seed)
    poly = CoeffSeq(np.concatenate([rng.standard_normal(32), np.zeros(8)]),
                    Space.H2)
    factored = ho.i_minus_shift(poly)
    radii = [1.0 - 2.0 ** (-j) for j in range(j_lo, j_hi + 1)]
    abel_log = tuple(sc.evaluate(ell, r).real for r in radii)
    abel_ims = tuple(sc.evaluate(ims_h2, r).real for r in radii)
    abel_poly = tuple(sc.evaluate(factored, r).real for r in radii)
    diffs = np.diff(abel_log)
    ok = (bool(np.all(np.abs(diffs + math.log(2.0)) < 1e-3))
          and abs(abel_ims[-1]) < 1e-3
          and abs(abel_poly[-1]) < 1e-2 * (1.0 + abs(poly.coeffs).max()))
    return RangeExclusionReport(tuple(range(j_lo, j_hi + 1)), abel_log,
                                abel_ims, abel_poly, ok)
