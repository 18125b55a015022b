"""Gram least-squares distances and the Mobius-series density certificate.

The quantitative heart of the package:

* ``build_gram`` / ``distance`` — least-squares distance from a target (the
  constant 1, or 1-z) to the span of h_2..h_K (or (I-S)h_2..(I-S)h_K) at
  truncation N.  The distance from 1 to span{h_k} is the numerical proxy
  for the Baez-Duarte/Nyman-Beurling closure statement; no finite K can
  reach 0, and the spec of this artifact asserts only monotone decrease.
* ``moebius_residual`` — the unconditional certificate: the explicit
  combination sum_{k=2}^n (mu(k)/k)(I-S)h_k converges to 1-z in H^2, with
  the residual decomposed as phi_n + M1(n) log(1-z) + (1 + M2(n)) where
  M1, M2 are the Mertens-type partial sums and ||phi_n||^2 is bounded by
  the exact divisor tail sum_{j>n} sigma(j)^2/j^2.
* ``compact_open_check`` — pointwise form of the same convergence:
  sum (mu(k)/k) h_k(z) -> 1 on the disk, with the evaluation-functional
  bound ||r_n|| / (|1-z| sqrt(1-|z|^2)).
* ``cyclicity_witness`` — the finite-dimensional mechanics behind the two
  cyclic vectors: span{W_n 1} contains every monomial (bidiagonal change
  of basis), and orthogonality to {1 - z^n} pins all coefficients equal.

Gram matrices of the h_k family are badly conditioned (the functions are
nearly parallel for large k), so the solver applies an adaptive ridge
starting at 1e-14 * trace/(K-1), multiplying by 10 until the Cholesky
factorization succeeds; the ridge actually used is always reported.
Assembly is compensated (chunked BLAS with Neumaier combination across
chunks), and every Gram entry's truncation tail bound is aggregated into
the report by Cauchy-Schwarz.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from ._accum import comp_sum
from . import hardyops as ho
from . import numtheory as nt
from .seriescore import DEFAULT_N

RIDGE_FLOOR_FACTOR = 1e-14
_MAX_RIDGE_TRIES = 40

FAMILIES = ("Hk", "ImsHk")
TARGETS = ("One", "OneMinusZ")

#: memory guard for streamed Gram assembly (entries of the coefficient block)
_MAX_GRAM_ELEMENTS = 10 ** 9


class NumericalError(RuntimeError):
    """A solver exhausted its ridge/fallback budget."""


@dataclass(frozen=True)
class GramSystem:
    family: str
    K: int
    N: int
    gram: np.ndarray
    target: str
    target_ip: np.ndarray
    target_norm2: float
    tail_bounds: np.ndarray     # per-function truncation tail bounds
    regularization: float       # ridge floor eps0 = 1e-14 * trace/(K-1)
    condition_estimate: float
    min_eig_estimate: float | None = None

    def __post_init__(self):
        self.gram.setflags(write=False)
        self.target_ip.setflags(write=False)
        self.tail_bounds.setflags(write=False)


@dataclass(frozen=True)
class DistanceReport:
    K: int
    N: int
    distance: float
    residual_coeffs_summary: dict
    solver: str
    regularization: float
    condition_estimate: float
    truncation_bound: float
    wall_time: float

    @property
    def ridge_slack(self) -> float:
        """Upper bound on the distance inflation due to the ridge, relative
        to any feasible combination x_c with ||x_c|| <= 1 (sqrt(eps))."""
        return math.sqrt(self.regularization)

    def to_dict(self, with_time: bool = True) -> dict:
        d = {
            "K": self.K, "N": self.N, "distance": self.distance,
            "residual_coeffs_summary": self.residual_coeffs_summary,
            "solver": self.solver, "regularization": self.regularization,
            "condition_estimate": self.condition_estimate,
            "truncation_bound": self.truncation_bound,
        }
        if with_time:
            d["wall_time"] = self.wall_time
        return d


@dataclass(frozen=True)
class MoebiusResidualReport:
    n: int
    N: int
    residual_norm: float
    phi_bound: float            # exact sum_{j>n} sigma(j)^2/j^2
    scalar_terms: tuple         # (M1(n), M2(n))
    norm_L_truncated: float     # ||log(1-z)||_{H^2} at truncation N
    slack: float = 1e-9

    def certified_bound(self) -> float:
        """RHS of the residual decomposition bound."""
        m1, m2 = self.scalar_terms
        return (math.sqrt(self.phi_bound)
                + abs(m1) * self.norm_L_truncated
                + abs(1.0 + m2) + self.slack)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "N": self.N, "residual_norm": self.residual_norm,
            "phi_bound": self.phi_bound,
            "M1": self.scalar_terms[0], "M2": self.scalar_terms[1],
            "norm_L_truncated": self.norm_L_truncated,
            "certified_bound": self.certified_bound(),
        }


# ---------------------------------------------------------------------------
# Gram assembly
# ---------------------------------------------------------------------------

def _coeff_block(family: str, ks: np.ndarray, j0: int, j1: int,
                 harmonic: np.ndarray | None) -> np.ndarray:
    """Coefficients of the family functions on index window [j0, j1)."""
    j = np.arange(j0, j1)
    block = np.empty((ks.size, j1 - j0))
    if family == "Hk":
        for i, k in enumerate(ks):
            block[i] = harmonic[j] - harmonic[j // k] - math.log(k)
        return block
    jf = j.astype(np.float64)
    base = np.zeros(j1 - j0)
    nz = j > 0
    base[nz] = 1.0 / jf[nz]
    for i, k in enumerate(ks):
        row = base.copy()
        if j0 == 0:
            row[0] = -math.log(k)
        first = ((j0 + k - 1) // k) * k
        if first == 0:
            first = k
        if first < j1:
            row[first - j0::k] -= k / jf[first - j0::k]
        block[i] = row
    return block


def _family_tail_bounds(family: str, ks: np.ndarray, n: int) -> np.ndarray:
    if family == "Hk":
        return np.array([ho.hk_tail_norm_bound(int(k), n) for k in ks])
    return np.array([_ims_tail_bound(int(k), n) for k in ks])


def _ims_tail_bound(k: int, n: int) -> float:
    m0 = max(-(-n // k), 2)
    return math.sqrt(1.0 / max(n - 1, 1) + ((k - 1.0) / k) ** 2 / (m0 - 1))


def _target_ip(family: str, target: str, ks: np.ndarray) -> np.ndarray:
    logs = np.log(ks.astype(np.float64))
    if target == "One":
        return -logs                       # constant coefficient is -log k
    if family == "Hk":
        # <1-z, h_k> = c_0(k) - c_1(k) = -log k - (1 - log k) = -1
        return -np.ones(ks.size)
    return -logs - 1.0                     # -log k - (1/1 - k[k|1])


def _factor_with_ridge(gram: np.ndarray, eps0: float):
    """Cholesky of gram + eps I, multiplying eps by 10 until it succeeds."""
    eps = eps0
    m = gram.shape[0]
    for _ in range(_MAX_RIDGE_TRIES):
        try:
            cho = sla.cho_factor(gram + eps * np.eye(m), lower=True,
                                 check_finite=False)
            return cho, eps
        except np.linalg.LinAlgError:
            eps = eps * 10 if eps > 0 else 1e-300
    raise NumericalError(f"Cholesky failed up to ridge {eps:.3e}")


def _condition_estimate(cho, gram: np.ndarray, eps: float) -> float:
    anorm = float(np.max(np.abs(gram + eps * np.eye(gram.shape[0])).sum(axis=1)))
    rcond, info = lapack.dpocon(cho[0], anorm, uplo=b"L" if cho[1] else b"U")
    if info != 0 or rcond <= 0:
        return math.inf
    return 1.0 / rcond


def build_gram(family: str, K: int, N: int = DEFAULT_N,
               target: str = "One") -> GramSystem:
    """Gram matrix of {f_k : 2 <= k <= K} at truncation N, plus target data.

    K = 1 is accepted and means the empty family (distance to {0}).
    Entries come from the closed-form coefficients; assembly is compensated
    across column chunks.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    if not (1 <= K <= 10 ** 4):
        raise ValueError("K must be in [1, 10^4]")
    if K > 1 and N < 2 * K:
        raise ValueError("need N >= 2K")
    m = K - 1
    t2 = 1.0 if target == "One" else 2.0
    if m == 0:
        return GramSystem(family, K, N, np.zeros((0, 0)), target,
                          np.zeros(0), t2, np.zeros(0), 0.0, 1.0, None)
    if m * min(N, 8192) > _MAX_GRAM_ELEMENTS:
        raise NumericalError("Gram assembly would exceed the memory guard")

    ks = np.arange(2, K + 1)
    harmonic = ho._harmonic(N - 1) if family == "Hk" else None
    chunk = int(min(8192, max(1024, _MAX_GRAM_ELEMENTS // (64 * m))))
    s = np.zeros((m, m))
    c = np.zeros((m, m))
    for j0 in range(0, N, chunk):
        block = _coeff_block(family, ks, j0, min(j0 + chunk, N), harmonic)
        p = block @ block.T
        t = s + p
        c += np.where(np.abs(s) >= np.abs(p), (s - t) + p, (p - t) + s)
        s = t
    gram = s + c
    gram = 0.5 * (gram + gram.T)  # symmetrize away BLAS asymmetry

    b = _target_ip(family, target, ks)
    tails = _family_tail_bounds(family, ks, N)
    eps0 = RIDGE_FLOOR_FACTOR * float(np.trace(gram)) / m
    cho, eps_used = _factor_with_ridge(gram, eps0)
    cond = _condition_estimate(cho, gram, eps_used)
    min_eig = None
    if m <= 2048:
        min_eig = float(np.linalg.eigvalsh(gram)[0])
    return GramSystem(family, K, N, gram, target, b, t2, tails, eps0,
                      cond, min_eig)


def ridge_solve_spd(gram: np.ndarray, b: np.ndarray, eps0: float):
    """Solve (gram + eps I) x = b with the adaptive ridge and one step of
    iterative refinement.  Returns (x, eps_used, cond_estimate)."""
    cho, eps = _factor_with_ridge(gram, eps0)
    a = gram + eps * np.eye(gram.shape[0])
    x = sla.cho_solve(cho, b, check_finite=False)
    x = x + sla.cho_solve(cho, b - a @ x, check_finite=False)
    return x, eps, _condition_estimate(cho, gram, eps)


def distance(system: GramSystem) -> DistanceReport:
    """Least-squares distance of the target from the family span.

    distance^2 = ||target||^2 - x.b, clamped at 0 with a warning; the
    truncation certificate aggregates the per-function tail bounds as
    sum |x_k| tau_k.
    """
    t0 = time.perf_counter()
    if system.K == 1:
        return DistanceReport(system.K, system.N, math.sqrt(system.target_norm2),
                              {"explained_norm2": 0.0, "clamped": False,
                               "solution_norm": 0.0, "max_coeff": 0.0},
                              "trivial", 0.0, 1.0, 0.0,
                              time.perf_counter() - t0)
    x, eps, cond = ridge_solve_spd(system.gram, system.target_ip,
                                   system.regularization)
    explained = float(x @ system.target_ip)
    d2 = system.target_norm2 - explained
    clamped = d2 < 0
    if clamped:
        warnings.warn(f"distance^2 clamped to 0 (was {d2:.3e})",
                      RuntimeWarning, stacklevel=2)
        d2 = 0.0
    trunc = float(np.abs(x) @ system.tail_bounds)
    summary = {
        "explained_norm2": explained,
        "clamped": clamped,
        "solution_norm": float(np.linalg.norm(x)),
        "max_coeff": float(np.max(np.abs(x))),
    }
    return DistanceReport(system.K, system.N, math.sqrt(d2), summary,
                          "cholesky+ridge", eps, cond, trunc,
                          time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Mobius-series certificate
# ---------------------------------------------------------------------------

def _tables_for(n: int, tables: nt.NTTables | None) -> nt.NTTables:
    if tables is None:
        return nt.cached_sieve(max(n, 1))
    if tables.limit < n:
        raise ValueError("tables too small for requested n")
    return tables


def moebius_combination_coeffs(n: int, N: int,
                               tables: nt.NTTables | None = None) -> np.ndarray:
    """Coefficients of sum_{k=2}^n (mu(k)/k) (I-S)h_k, assembled from the
    per-coefficient closed form (never by summing n dense vectors):
    coefficient 0 is -M2(n); coefficient j >= 1 is (M1(n) - D_n(j))/j with
    D_n(j) = sum of mu(d) over divisors d <= n of j.
    """
    tables = _tables_for(n, tables)
    m1 = float(tables.mertens_over_k[n])
    m2 = float(tables.mertens_logk_over_k[n])
    d = nt.mobius_divisor_sums(tables, n, N)
    out = np.empty(N)
    out[0] = -m2
    j = np.arange(1, N, dtype=np.float64)
    out[1:] = (m1 - d[1:]) / j
    return out


def moebius_residual(n: int, N: int = DEFAULT_N,
                     tables: nt.NTTables | None = None) -> MoebiusResidualReport:
    """H^2 norm of [the Mobius combination] - (1 - z) at truncation N,
    with the exact divisor tail bound and the Mertens scalar terms."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if N < 2:
        raise ValueError("N must be >= 2")
    tables = _tables_for(n, tables)
    coeffs = moebius_combination_coeffs(n, N, tables)
    coeffs[0] -= 1.0   # subtract target 1 - z
    coeffs[1] += 1.0
    r2 = comp_sum(coeffs * coeffs)
    m1 = float(tables.mertens_over_k[n])
    m2 = float(tables.mertens_logk_over_k[n])
    phi = nt.divisor_sq_tail(tables, n)
    j = np.arange(1, N, dtype=np.float64)
    norm_l = math.sqrt(comp_sum(1.0 / (j * j)))
    return MoebiusResidualReport(n, N, math.sqrt(r2), phi, (m1, m2), norm_l)


@dataclass(frozen=True)
class PointwiseReport:
    z: complex
    n: int
    N: int
    value: complex
    abs_error: float    # |value - 1|
    bound: float        # evaluation-functional bound

    def to_dict(self) -> dict:
        return {"z_re": self.z.real, "z_im": self.z.imag, "n": self.n,
                "N": self.N, "abs_error": self.abs_error, "bound": self.bound}


def compact_open_check(points, n: int, N: int = DEFAULT_N,
                       tables: nt.NTTables | None = None) -> list[PointwiseReport]:
    """Evaluate sum_{k=2}^n (mu(k)/k) h_k at each |z| < 1 and compare to 1.

    The certified bound divides the full-space residual-norm bound by
    |1-z| sqrt(1-|z|^2) (norm of the evaluation functional against the
    (1-z)-weighted tail).  Coefficients of the h_k combination are the
    running sums of the (I-S) combination.
    """
    tables = _tables_for(n, tables)
    pts = [complex(z) for z in points]
    for z in pts:
        if abs(z) >= 1.0:
            raise ValueError("points must satisfy |z| < 1")
    coeffs = np.cumsum(moebius_combination_coeffs(n, N, tables))
    m1 = float(tables.mertens_over_k[n])
    m2 = float(tables.mertens_logk_over_k[n])
    phi = nt.divisor_sq_tail(tables, n)
    # full-space residual bound: ||phi_n|| + |M1| ||L|| + |1 + M2|
    r_full = math.sqrt(phi) + abs(m1) * math.pi / math.sqrt(6.0) + abs(1.0 + m2)
    out = []
    for z in pts:
        val = complex(np.polynomial.polynomial.polyval(z, coeffs))
        bound = r_full / (abs(1.0 - z) * math.sqrt(1.0 - abs(z) ** 2)) + 1e-12
        out.append(PointwiseReport(z, n, N, val, abs(val - 1.0), bound))
    return out


# ---------------------------------------------------------------------------
# cyclicity witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicityReport:
    family: str
    n_max: int
    kernel_dim: int | None
    max_deviation: float
    passed: bool

    def to_dict(self) -> dict:
        return {"family": self.family, "n_max": self.n_max,
                "kernel_dim": self.kernel_dim,
                "max_deviation": self.max_deviation, "pass": self.passed}


def cyclicity_witness(family: str, n_max: int, N: int | None = None) -> CyclicityReport:
    """Finite-dimensional mechanics of the two cyclic vectors.

    WnOnOne: W_n 1 = 1 + z + ... + z^{n-1}, so z^{n-1} = W_n 1 - W_{n-1} 1:
    the change of basis to the monomials is bidiagonal and exact.

    TnOnOneMinusZ: a vector orthogonal to every 1 - z^n (n <= n_max) has
    coefficients 0..n_max all equal; the orthogonality system's kernel is
    one-dimensional, spanned by the truncated all-ones vector (which
    leaves H^2 only in the limit).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if family == "WnOnOne":
        size = N or (n_max + 1)
        one = ho.named_function("One", size)
        dev = 0.0
        prev = np.zeros(size)
        for n in range(1, n_max + 1):
            wn = ho.w_n(n, one).coeffs
            expect = np.zeros(size)
            expect[:n] = 1.0
            dev = max(dev, float(np.max(np.abs(wn - expect))))
            mono = wn - prev           # should be exactly z^{n-1}
            expect_mono = np.zeros(size)
            expect_mono[n - 1] = 1.0
            dev = max(dev, float(np.max(np.abs(mono - expect_mono))))
            prev = wn
        return CyclicityReport(family, n_max, None, dev, dev == 0.0)
    if family == "TnOnOneMinusZ":
        rows = np.zeros((n_max, n_max + 1))
        rows[:, 0] = 1.0
        rows[np.arange(n_max), np.arange(1, n_max + 1)] = -1.0
        sv = np.linalg.svd(rows, compute_uv=False)
        null_dim = (n_max + 1) - int(np.sum(sv > 1e-12 * sv[0]))
        _, _, vt = np.linalg.svd(rows)
        kernel = vt[-1]
        dev = float(np.max(np.abs(kernel - kernel.mean())))
        return CyclicityReport(family, n_max, null_dim, dev,
                               null_dim == 1 and dev <= 1e-12)
    raise ValueError(f"unknown witness family: {family}")
