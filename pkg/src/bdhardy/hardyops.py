"""Named functions and operators on the Hardy and weighted Bergman spaces.

Constructors
    * ``hk_coeffs`` — the functions h_k(z) = (1-z)^{-1} log((1+z+...+z^{k-1})/k)
      whose closed linear span in H^2 encodes the Baez-Duarte criterion;
      coefficient n is H(n) - H(floor(n/k)) - log k.
    * ``ims_hk_coeffs`` — (I-S)h_k = log(1-z^k) - log(1-z) - log k, exact in
      closed form (coefficient j >= 1 is 1/j - k[k|j]/j).
    * ``named_function`` — log(1-z), the geometric kernel R = 1/(1-z), the
      Bergman-space images R_k of the periodic sequences r_k(n) = k{n/k},
      the logarithms s_k = log(1+z+...+z^{k-1}), and the constants.

Operators (all pure; each returns a CoeffSeq whose ``trunc_bound`` carries
a conservative norm bound on what truncation dropped)
    * shift S and I - S on H^2;
    * the weighted composition semigroup W_n f = (1+z+...+z^{n-1}) f(z^n);
    * the composition semigroup T_n f = f(z^n);
    * the isometries T: H^2 -> BergmanA, its inverse, the index shift
      Psi: L2Omega -> BergmanA, and Phi = T^{-1} Psi.

``verify_identity`` re-checks the algebraic identities these satisfy
(semigroup laws, the intertwining T_n(I-S) = (I-S)W_n, W_n h_k = h_{nk} - h_n,
isometry of T and Psi, and Phi r_k = h_k) and reports discrepancies over the
index range that truncation cannot contaminate.
"""

from __future__ import annotations

import json
import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._accum import NeumaierSum, comp_dot_w, comp_sum
from . import seriescore as sc
from .seriescore import DEFAULT_N, CoeffSeq, Space
from .numtheory import harmonic_numbers

#: Calibrated constant in |c_n(k)| <= C k / n (scan over n <= 1e6, k <= 100
#: gives 0.56649; the supremum approaches Euler's gamma = 0.57722 at n = k-1
#: for large k).
HK_TAIL_CONSTANT = 0.6

_harmonic_lock = threading.Lock()
_harmonic_cache: dict[int, np.ndarray] = {}


def _harmonic(n: int) -> np.ndarray:
    """Memoized harmonic table; reuses the largest one built so far."""
    with _harmonic_lock:
        best = max(_harmonic_cache, default=-1)
        if best >= n:
            return _harmonic_cache[best][:n + 1]
    arr = harmonic_numbers(n)
    with _harmonic_lock:
        _harmonic_cache.clear()
        _harmonic_cache[n] = arr
    return arr


def hk_tail_norm_bound(k: int, n: int) -> float:
    """H2-norm bound of the h_k coefficients dropped at truncation n.

    From |c_j(k)| <= C k/j: sum_{j>=n} (Ck/j)^2 <= C^2 k^2 / (n-1).
    """
    return HK_TAIL_CONSTANT * k / math.sqrt(max(n - 1, 1))


def hk_coeffs(k: int, n: int = DEFAULT_N) -> CoeffSeq:
    """Truncated h_k in H^2: coefficient j is H(j) - H(floor(j/k)) - log k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    h = _harmonic(n - 1)
    j = np.arange(n)
    coeffs = h[j] - h[j // k] - math.log(k)
    return CoeffSeq(coeffs, Space.H2, trunc_bound=hk_tail_norm_bound(k, n))


def hk_coeffs_recurrence(k: int, n: int = DEFAULT_N) -> CoeffSeq:
    """Independent O(n) construction of h_k by the compensated recurrence
    c_j = c_{j-1} + 1/j - k[k|j]/j with c_0 = -log k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    coeffs = np.empty(n)
    acc = NeumaierSum(-math.log(k))
    coeffs[0] = acc.value
    for j in range(1, n):
        step = 1.0 / j - (k / j if j % k == 0 else 0.0)
        coeffs[j] = acc.add(step)
    return CoeffSeq(coeffs, Space.H2, trunc_bound=hk_tail_norm_bound(k, n))


def hkc_partial_norms(k: int, c: float, n_list) -> np.ndarray:
    """Truncated H^2 norms of h_{k,c} = h_k + log(k/c)/(1-z) at each length.

    For c = k the sequence is Cauchy; for c != k it grows like
    |log(k/c)| sqrt(N), witnessing that h_{k,c} leaves H^2.
    """
    if c <= 0:
        raise ValueError("c must be > 0")
    n_list = [int(n) for n in n_list]
    n_max = max(n_list)
    delta = math.log(k) - math.log(c)
    f = hk_coeffs(k, n_max)
    vals = (f.coeffs + delta) ** 2
    csum = np.cumsum(vals)
    return np.sqrt(csum[np.asarray(n_list) - 1])


def ims_hk_coeffs(k: int, n: int = DEFAULT_N) -> CoeffSeq:
    """(I-S)h_k = log(1-z^k) - log(1-z) - log k, exact closed form."""
    if k < 2:
        raise ValueError("k must be >= 2")
    j = np.arange(n, dtype=np.float64)
    coeffs = np.zeros(n)
    coeffs[0] = -math.log(k)
    coeffs[1:] = 1.0 / j[1:]
    if k < n:
        coeffs[k::k] -= k / j[k::k]
    # tail: 1/j^2 off multiples of k, ((k-1)/j)^2 on them
    m0 = max(-(-n // k), 2)
    tail_sq = 1.0 / max(n - 1, 1) + ((k - 1.0) / k) ** 2 / (m0 - 1)
    return CoeffSeq(coeffs, Space.H2, trunc_bound=math.sqrt(tail_sq))


def rk_sequence(k: int, n: int) -> np.ndarray:
    """First n entries of r_k(m) = k {m/k} (m = 1..n): period k, values
    1, 2, ..., k-1, 0 repeating."""
    return (np.arange(1, n + 1) % k).astype(np.float64)


def named_function(name: str, n: int = DEFAULT_N, k: int | None = None) -> CoeffSeq:
    """Constructors for the named series used across the experiments.

    ========  =========  ===============================================
    name      space      function
    ========  =========  ===============================================
    L_log1mz  H2         log(1-z) = -sum z^j/j
    R_geom    BergmanA   1/(1-z), all-ones with exact constant tail
    R_k       BergmanA   image of r_k under the index shift (periodic)
    s_k       H2         log(1+z+...+z^{k-1}) = log k + (z-1)(-h_k)
    One       H2         1
    OneMinusZ H2         1 - z
    ========  =========  ===============================================
    """
    if name == "L_log1mz":
        coeffs = np.zeros(n)
        coeffs[1:] = -1.0 / np.arange(1, n)
        return CoeffSeq(coeffs, Space.H2,
                        trunc_bound=1.0 / math.sqrt(max(n - 1, 1)))
    if name == "R_geom":
        return CoeffSeq(np.ones(n), Space.BergmanA, tail_constant=1.0)
    if name == "R_k":
        if k is None or k < 1:
            raise ValueError("R_k needs k >= 1")
        if k == 1:
            return sc.zeros(n, Space.BergmanA)
        # Bergman tail of the periodic values: max entry k-1, weights 1/(N+1)
        return CoeffSeq(rk_sequence(k, n), Space.BergmanA,
                        trunc_bound=(k - 1.0) / math.sqrt(n + 1.0))
    if name == "s_k":
        if k is None or k < 2:
            raise ValueError("s_k needs k >= 2")
        base = ims_hk_coeffs(k, n)
        coeffs = base.coeffs.copy()
        coeffs[0] = 0.0  # s_k(0) = log 1 = 0; the -log k cancels
        return CoeffSeq(coeffs, Space.H2, trunc_bound=base.trunc_bound)
    if name == "One":
        out = np.zeros(n)
        out[0] = 1.0
        return CoeffSeq(out, Space.H2)
    if name == "OneMinusZ":
        out = np.zeros(max(n, 2))
        out[0], out[1] = 1.0, -1.0
        return CoeffSeq(out[:n] if n >= 2 else out, Space.H2)
    raise ValueError(f"unknown function name: {name}")


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

_TAG_KINDS = ("Shift", "IMinusShift", "W", "T_n", "T_map", "T_inv", "Psi", "Phi")


@dataclass(frozen=True)
class OperatorTag:
    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind not in _TAG_KINDS:
            raise ValueError(f"unknown operator kind: {self.kind}")
        if self.kind in ("W", "T_n"):
            if self.n is None or self.n < 1:
                raise ValueError(f"{self.kind} needs parameter n >= 1")


def _require_space(f: CoeffSeq, space: Space, op: str) -> None:
    if f.space is not space:
        raise sc.SpaceMismatchError(f"{op} expects {space.value}, got {f.space.value}")


def shift(f: CoeffSeq) -> CoeffSeq:
    """S: prepend a zero; the stored index N-1 value is dropped into the bound."""
    _require_space(f, Space.H2, "S")
    out = np.empty(f.n)
    out[0] = 0.0
    out[1:] = f.coeffs[:-1]
    return CoeffSeq(out, Space.H2,
                    trunc_bound=f.trunc_bound + abs(float(f.coeffs[-1])))


def i_minus_shift(f: CoeffSeq) -> CoeffSeq:
    """(I-S)f: b_0 = a_0, b_j = a_j - a_{j-1}; index N enters the bound."""
    _require_space(f, Space.H2, "I-S")
    out = np.empty(f.n)
    out[0] = f.coeffs[0]
    out[1:] = f.coeffs[1:] - f.coeffs[:-1]
    # ||(I-S)(dropped tail)|| <= 2 tau, plus the boundary term at index N
    bound = 2.0 * f.trunc_bound + abs(float(f.coeffs[-1]))
    return CoeffSeq(out, Space.H2, trunc_bound=bound)


def w_n(n: int, f: CoeffSeq) -> CoeffSeq:
    """W_n f = (1+z+...+z^{n-1}) f(z^n): coefficient m is a_{floor(m/n)}.

    Output keeps length N; the replication that would land beyond N is
    accounted in the bound (||W_n g|| <= sqrt(n) ||g||).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _require_space(f, Space.H2, "W_n")
    size = f.n
    out = f.coeffs[np.arange(size) // n]
    # coefficients of f at indices >= ceil(N/n) are replicated past N
    j0 = -(-size // n)
    dropped = f.coeffs[j0:]
    bound = math.sqrt(n) * (f.trunc_bound + math.sqrt(comp_sum(dropped * dropped)))
    return CoeffSeq(out, Space.H2, trunc_bound=bound)


def t_n(n: int, f: CoeffSeq) -> CoeffSeq:
    """T_n f = f(z^n): coefficient m is a_{m/n} when n | m, else 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _require_space(f, Space.H2, "T_n")
    size = f.n
    out = np.zeros(size)
    src = f.coeffs[:-(-size // n)]
    out[::n][:src.size] = src
    j0 = -(-size // n)
    dropped = f.coeffs[j0:]
    bound = f.trunc_bound + math.sqrt(comp_sum(dropped * dropped))
    return CoeffSeq(out, Space.H2, trunc_bound=bound)


def t_map(f: CoeffSeq) -> CoeffSeq:
    """T g = ((1-z)g)'/(1-z), the isometry H^2 -> BergmanA.

    Coefficientwise b_j - b_{j-1} = (j+1)(a_{j+1} - a_j) with b_{-1} = 0.
    For the stored polynomial the image has an exact eventual-constant
    tail, so ||T f_N||_A = ||f_N||_{H2} exactly; the dropped tail costs
    exactly tau by isometry.
    """
    _require_space(f, Space.H2, "T")
    a_ext = np.concatenate([f.coeffs, [f.tail_constant]])
    j = np.arange(f.n, dtype=np.float64)
    inc = (j + 1.0) * (a_ext[1:] - a_ext[:-1])
    b = np.cumsum(inc)
    return CoeffSeq(b, Space.BergmanA, tail_constant=float(b[-1]),
                    trunc_bound=f.trunc_bound)


@dataclass(frozen=True)
class TInvResult:
    """t_inv output plus the selection-rule diagnostics."""
    seq: CoeffSeq
    offset: float          # constant subtracted by the H2 selection rule
    window: int            # averaging window (final 1% of indices)
    drift: float           # half-window mean difference (stability measure)
    stabilized: bool


def t_inv(g: CoeffSeq, window_frac: float = 0.01,
          stab_tol: float = 1e-3) -> TInvResult:
    """Invert T with the free constant fixed by the H2 selection rule.

    The recurrence a_{j+1} = a_j + (b_j - b_{j-1})/(j+1) leaves a_0 free
    (solutions differ by a constant); requiring the mean of the final 1%
    of coefficients to vanish projects onto the decaying H2 solution.
    A drift between the two halves of the window above ``stab_tol`` is
    reported (and warned about), never silently accepted.
    """
    _require_space(g, Space.BergmanA, "T^{-1}")
    n = g.n
    inc = np.empty(n)
    inc[0] = g.coeffs[0]
    inc[1:] = g.coeffs[1:] - g.coeffs[:-1]
    inc /= np.arange(1, n + 1, dtype=np.float64)
    a = np.zeros(n)
    a[1:] = np.cumsum(inc[:-1])
    w = max(1, int(n * window_frac))
    tail = a[n - w:]
    offset = -float(tail.mean())
    half = max(1, w // 2)
    drift = abs(float(tail[:half].mean()) - float(tail[-half:].mean()))
    scale = 1.0 + abs(offset)
    stabilized = drift <= stab_tol * scale
    if not stabilized:
        warnings.warn(f"T^{{-1}} selection rule did not stabilize: "
                      f"window drift {drift:.3e}", RuntimeWarning, stacklevel=2)
    # isometry carries tau through; the offset uncertainty costs drift*sqrt(n)
    bound = g.trunc_bound + drift * math.sqrt(n)
    seq = CoeffSeq(a + offset, Space.H2, trunc_bound=bound)
    return TInvResult(seq, offset, w, drift, stabilized)


def psi(x: CoeffSeq) -> CoeffSeq:
    """Psi: (x(1), x(2), ...) -> sum x(n+1) z^n, an exact index reinterpretation."""
    _require_space(x, Space.L2Omega, "Psi")
    return CoeffSeq(x.coeffs, Space.BergmanA, x.tail_constant, x.trunc_bound)


def phi_map(x: CoeffSeq) -> TInvResult:
    """Phi = T^{-1} Psi: the isometry from the weighted sequence space to H^2."""
    return t_inv(psi(x))


def apply_operator(tag: OperatorTag, f: CoeffSeq) -> CoeffSeq:
    """Dispatch on an OperatorTag (T_inv/Phi return the selected H2 solution)."""
    if tag.kind == "Shift":
        return shift(f)
    if tag.kind == "IMinusShift":
        return i_minus_shift(f)
    if tag.kind == "W":
        return w_n(tag.n, f)
    if tag.kind == "T_n":
        return t_n(tag.n, f)
    if tag.kind == "T_map":
        return t_map(f)
    if tag.kind == "T_inv":
        return t_inv(f).seq
    if tag.kind == "Psi":
        return psi(f)
    if tag.kind == "Phi":
        return phi_map(f).seq
    raise ValueError(f"unknown operator kind: {tag.kind}")


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

IDENTITIES = ("SemigroupW", "SemigroupT", "Quasiconjugacy", "WnOnHk",
              "PhiMapsRkToHk", "TIsometry", "PsiIsometry")

#: PASS threshold for identities that are exact at finite truncation.
EXACT_TOL = 1e-10


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    params: dict
    sup_discrepancy: float
    weighted_discrepancy: float
    reliable_range: int
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "params": self.params,
            "sup_discrepancy": self.sup_discrepancy,
            "weighted_discrepancy": self.weighted_discrepancy,
            "reliable_range": self.reliable_range,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _random_h2(n: int, rng: np.random.Generator) -> CoeffSeq:
    return CoeffSeq(rng.standard_normal(n), Space.H2)


def _diff_report(identity: str, params: dict, lhs: np.ndarray, rhs: np.ndarray,
                 reliable: int, tol: float = EXACT_TOL) -> IdentityReport:
    d = lhs[:reliable] - rhs[:reliable]
    sup = float(np.max(np.abs(d))) if reliable else 0.0
    wnorm = math.sqrt(comp_sum(d * d))
    return IdentityReport(identity, params, sup, wnorm, reliable, tol,
                          sup <= tol)


def verify_identity(identity: str, params: dict | None = None,
                    n: int = DEFAULT_N, seed: int = 0) -> IdentityReport:
    """Numerically verify one operator identity; see IDENTITIES.

    Discrepancies are measured over the index range truncation cannot
    contaminate (N/(m*n) for the semigroup laws, all of N for the exact
    coefficientwise identities, N/2 for Phi r_k = h_k which also gets its
    propagated truncation certificate as the PASS threshold).
    """
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    if identity == "SemigroupW":
        m, nn = int(params["m"]), int(params["n"])
        f = _random_h2(n, rng)
        lhs = w_n(m, w_n(nn, f))
        rhs = w_n(m * nn, f)
        return _diff_report(identity, params, lhs.coeffs, rhs.coeffs, n // (m * nn))
    if identity == "SemigroupT":
        m, nn = int(params["m"]), int(params["n"])
        f = _random_h2(n, rng)
        lhs = t_n(m, t_n(nn, f))
        rhs = t_n(m * nn, f)
        return _diff_report(identity, params, lhs.coeffs, rhs.coeffs, n // (m * nn))
    if identity == "Quasiconjugacy":
        nn = int(params["n"])
        f = _random_h2(n, rng)
        lhs = t_n(nn, i_minus_shift(f))
        rhs = i_minus_shift(w_n(nn, f))
        return _diff_report(identity, params, lhs.coeffs, rhs.coeffs, n)
    if identity == "WnOnHk":
        nn, k = int(params["n"]), int(params["k"])
        lhs = w_n(nn, hk_coeffs(k, n))
        rhs = sc.subtract(hk_coeffs(nn * k, n), hk_coeffs(nn, n))
        return _diff_report(identity, params, lhs.coeffs, rhs.coeffs, n)
    if identity == "PhiMapsRkToHk":
        k = int(params["k"])
        res = phi_map(CoeffSeq(rk_sequence(k, n), Space.L2Omega))
        target = hk_coeffs(k, n)
        reliable = n // 2
        cert = HK_TAIL_CONSTANT * k / (n - res.window) + 1e-12
        d = res.seq.coeffs[:reliable] - target.coeffs[:reliable]
        sup = float(np.max(np.abs(d)))
        wnorm = math.sqrt(comp_sum(d * d))
        return IdentityReport(identity, params, sup, wnorm, reliable, cert,
                              sup <= cert)
    if identity == "TIsometry":
        deg = int(params.get("degree", 64))
        coeffs = np.zeros(max(2 * deg, 8))
        coeffs[:deg + 1] = rng.standard_normal(deg + 1)
        g = CoeffSeq(coeffs, Space.H2)
        lhs = sc.norm(t_map(g))
        rhs = sc.norm(g)
        rel = abs(lhs - rhs) / rhs
        return IdentityReport(identity, {"degree": deg}, rel, rel, g.n,
                              1e-12, rel <= 1e-12)
    if identity == "PsiIsometry":
        x = CoeffSeq(rng.standard_normal(n), Space.L2Omega,
                     tail_constant=float(rng.standard_normal()))
        rel = abs(sc.norm(psi(x)) - sc.norm(x))
        return IdentityReport(identity, {}, rel, rel, n, 0.0, rel == 0.0)
    raise ValueError(f"unknown identity: {identity}")
