"""Local Dirichlet decompositions f = a + (z - zeta) g and their probes.

A function f lies in the local Dirichlet space at a boundary point zeta
exactly when it splits as f = a + (z - zeta) g with g in H^2; then the
local Dirichlet energy is ||g||^2 and a is the radial boundary value
f*(zeta).  The split is computed by synthetic division, which is exact for
polynomials (and every stored CoeffSeq is one); for truncations of
infinite series the boundary value is estimated by an Abel mean along the
radius unless the caller supplies it.

Also here:

* the energy cross-check D(s_k) = ||R_k||^2 in the weighted Bergman space,
  two genuinely independent computations of the same number (synthetic
  division of log(1+z+...+z^{k-1}) versus the periodic Bergman coefficients
  of R_k), each with its truncation tail restored — the Bergman tail in
  exact digamma closed form per residue class, the Dirichlet tail by a
  direct extension sum plus the calibrated (k^2-1)/(12J) remainder;
* the golden-ratio pair check: a(z) = g(1-z)/((g+1)-z) with g the golden
  ratio satisfies |a|^2 + |b|^2 = 1 on the unit circle for b = a/(1-z),
  the concrete de Branges-Rovnyak pair attached to 1/(1-z);
* orthogonality probes of arbitrary f against the h_k family.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from ._accum import comp_sum
from . import bdcriterion as bd
from . import hardyops as ho
from . import seriescore as sc
from .seriescore import DEFAULT_N, CoeffSeq, Space

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class DirichletDecomposition:
    zeta: complex
    a: complex                  # boundary value estimate (real for zeta = 1)
    g: CoeffSeq | None          # quotient, as a CoeffSeq when real
    energy: float               # ||g||^2
    residual: float             # |f(zeta) - a| at the truncation
    n: int

    def to_dict(self) -> dict:
        def _c(v):
            v = complex(v)
            return v.real if v.imag == 0.0 else [v.real, v.imag]
        return {"zeta": _c(self.zeta), "a": _c(self.a),
                "energy": self.energy, "residual": self.residual, "N": self.n}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _synthetic_division(p: np.ndarray, zeta: complex):
    """Quotient g with p(z) = (z - zeta) g(z) + p(zeta); len(g) = len(p) - 1."""
    if zeta == 1.0:
        g = -np.cumsum(p[:-1])
        # residual |p(1)| = |p_{n-1} - g_{n-2}|: the coefficient the division
        # cannot match once the boundary value is fixed
        resid = float(abs(p[-1] - g[-1])) if g.size else float(abs(p[-1]))
        return g, resid
    n = p.size
    g = np.empty(n - 1, dtype=complex)
    prev = 0.0 + 0.0j
    for jj in range(n - 1):
        prev = (prev - p[jj]) / zeta
        g[jj] = prev
    resid = abs(p[-1] - (g[-1] if n > 1 else 0.0))
    return g, float(resid)


def decompose(f: CoeffSeq, zeta: complex,
              boundary_value: complex | None = None) -> DirichletDecomposition:
    """Split f = a + (z - zeta) g by synthetic division.

    For an exactly represented polynomial (trunc_bound = 0) the boundary
    value is f(zeta) and the split is exact.  For a truncated series, a is
    estimated by the Abel mean f(r zeta) at r = 1 - 1/sqrt(N) — balancing
    truncation noise against limit bias — unless ``boundary_value`` is
    supplied (use it when the boundary value is known exactly; the energy
    is quite sensitive to it).  The residual |f(zeta) - a| measures how far
    the truncated data is from an exact split.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError("zeta must lie on the unit circle")
    _ = sc  # H2 only
    if f.space is not Space.H2:
        raise sc.SpaceMismatchError("decompose expects an H2 sequence")
    n = f.n
    coeffs = f.coeffs
    if boundary_value is not None:
        a = complex(boundary_value)
    elif f.trunc_bound == 0.0:
        a = complex(np.polynomial.polynomial.polyval(zeta, coeffs))
    else:
        r = 1.0 - 1.0 / math.sqrt(n)
        a = sc.evaluate(f, r * zeta)
    p = coeffs.astype(complex) if zeta != 1.0 else coeffs.copy()
    p[0] -= a if zeta != 1.0 else a.real
    g_arr, resid = _synthetic_division(p, 1.0 if zeta == 1.0 else zeta)
    if zeta == 1.0:
        g = CoeffSeq(g_arr, Space.H2) if g_arr.size else sc.zeros(1, Space.H2)
        energy = sc.inner_product(g, g)
        a_out: complex = a.real if isinstance(a, complex) else a
    else:
        g = None
        energy = comp_sum((g_arr * g_arr.conjugate()).real)
        a_out = a
    return DirichletDecomposition(zeta, a_out, g, energy, resid, n)


def reconstruct(dec: DirichletDecomposition) -> CoeffSeq:
    """a + (z - zeta) g, for round-trip checks (real zeta path only)."""
    if dec.g is None:
        raise ValueError("complex-zeta decompositions are not reconstructible "
                         "as real sequences")
    zr = complex(dec.zeta).real
    garr = dec.g.coeffs
    out = np.zeros(garr.size + 1)
    out[0] = complex(dec.a).real - zr * garr[0]
    out[1:-1] = garr[:-1] - zr * garr[1:]
    out[-1] = garr[-1]
    return CoeffSeq(out, Space.H2)


# ---------------------------------------------------------------------------
# Bergman-side norms of R_k and the energy cross-check
# ---------------------------------------------------------------------------

def rk_bergman_tail_exact(k: int, m_start: int) -> float:
    """Exact sum_{m >= m_start} r_k(m)^2 / (m (m+1)) by residue class:
    sum over i >= 0 of 1/((m0+ik)(m0+ik+1)) = (psi((m0+1)/k) - psi(m0/k))/k."""
    total = 0.0
    for a in range(1, k):
        m0 = m_start + ((a - m_start) % k)
        total += a * a * (digamma((m0 + 1) / k) - digamma(m0 / k)) / k
    return total


def rk_bergman_norm2_exact(k: int) -> float:
    """Exact ||R_k||^2 in the weighted Bergman space (R_1 is identically 0)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return rk_bergman_tail_exact(k, 1) if k > 1 else 0.0


def hk_tail_energy(k: int, n_start: int, j_cap: int | None = None) -> float:
    """sum_{j >= n_start} c_j(k)^2: direct extension sum to j_cap plus the
    calibrated sawtooth remainder (k^2 - 1)/(12 j_cap)."""
    if j_cap is None:
        j_cap = max(2 ** 22, 16 * n_start)
    h = ho._harmonic(j_cap - 1)
    j = np.arange(n_start, j_cap)
    c = h[j] - h[j // k] - math.log(k)
    return comp_sum(c * c) + (k * k - 1.0) / (12.0 * j_cap)


def dirichlet_energy_bergman_crosscheck(k: int, n: int = DEFAULT_N) -> tuple[float, float]:
    """Two independent computations of D_{delta_1}(s_k) = ||R_k||^2_A.

    Dirichlet side: synthetic division of the truncated s_k at zeta = 1
    with the exact boundary value log k, energy tail restored by
    ``hk_tail_energy``.  Bergman side: compensated finite coefficient sum
    of R_k plus the exact digamma tail.  The two must agree within the
    combined (tiny) model slacks; truncation itself cancels exactly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return 0.0, 0.0
    s_k = ho.named_function("s_k", n, k=k)
    dec = decompose(s_k, 1.0, boundary_value=math.log(k))
    # g has length n-1, so its stored energy covers j <= n-2
    energy = dec.energy + hk_tail_energy(k, n - 1)

    r_k = ho.named_function("R_k", n, k=k)
    w = sc.weights(Space.BergmanA, 0, n)
    berg = comp_sum(w * r_k.coeffs * r_k.coeffs) + rk_bergman_tail_exact(k, n + 1)
    return energy, berg


# ---------------------------------------------------------------------------
# golden-ratio pair
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldenPairReport:
    grid: int
    max_deviation: float    # max | |a|^2 + |b|^2 - 1 | on the circle
    a_at_zero: float
    passed: bool

    def to_dict(self) -> dict:
        return {"grid": self.grid, "max_deviation": self.max_deviation,
                "a_at_zero": self.a_at_zero, "pass": self.passed}


def golden_a(z):
    """a(z) = gamma (1-z) / ((gamma+1) - z), gamma the golden ratio."""
    z = np.asarray(z, dtype=complex)
    return GOLDEN_RATIO * (1.0 - z) / ((GOLDEN_RATIO + 1.0) - z)


def golden_b(z):
    """b(z) = a(z)/(1-z): the numerator of the pair with b/a = 1/(1-z)."""
    z = np.asarray(z, dtype=complex)
    return GOLDEN_RATIO / ((GOLDEN_RATIO + 1.0) - z)


def golden_pair_check(grid: int = 10 ** 4, tol: float = 1e-12) -> GoldenPairReport:
    """Verify |a|^2 + |b|^2 = 1 at ``grid`` unit-circle points and a(0) > 0."""
    if grid < 8:
        raise ValueError("grid must be >= 8")
    theta = 2.0 * math.pi * np.arange(grid) / grid
    z = np.exp(1j * theta)
    dev = np.abs(np.abs(golden_a(z)) ** 2 + np.abs(golden_b(z)) ** 2 - 1.0)
    a0 = float(golden_a(0.0).real)
    passed = bool(np.max(dev) <= tol and a0 > 0.0)
    return GoldenPairReport(grid, float(np.max(dev)), a0, passed)


# ---------------------------------------------------------------------------
# orthogonality probes against {h_k}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrthogonalityProbe:
    K: int
    inner_products: np.ndarray      # <f, h_k>, k = 2..K
    projection_norm: float          # norm of the projection onto span{h_k}
    f_norm: float

    def to_dict(self) -> dict:
        return {"K": self.K, "inner_products": self.inner_products.tolist(),
                "projection_norm": self.projection_norm, "f_norm": self.f_norm}


def orthogonality_probe(f: CoeffSeq, K: int, n: int | None = None) -> OrthogonalityProbe:
    """<f, h_k> for k = 2..K plus the norm of the projection of f onto
    span{h_2..h_K} (Gram solve with the shared ridge policy); exploratory
    data for how fast projections of smooth f fill out ||f||."""
    if K < 2:
        raise ValueError("K must be >= 2")
    if f.space is not Space.H2:
        raise sc.SpaceMismatchError("probe expects an H2 sequence")
    n = n or max(f.n, 2 * K)
    sys = bd.build_gram("Hk", K, n, target="One")
    fpad = sc.pad_to(f, n)
    ips = np.array([sc.inner_product(fpad, ho.hk_coeffs(k, n))
                    for k in range(2, K + 1)])
    x, _, _ = bd.ridge_solve_spd(sys.gram, ips, sys.regularization)
    proj2 = max(float(x @ ips), 0.0)
    return OrthogonalityProbe(K, ips, math.sqrt(proj2), sc.norm(f))
