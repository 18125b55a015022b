"""Truncated analytic-function representation and the three weighted inner products.

A :class:`CoeffSeq` holds the first ``N`` Maclaurin coefficients of an
analytic function on the unit disk (or the first ``N`` entries of a
sequence), tagged with the Hilbert space whose weights define its norm:

* ``H2`` — the Hardy space, weight 1 on every coefficient;
* ``BergmanA`` — the weighted Bergman space with weight 1/((n+1)(n+2)) on
  coefficient n (n from 0);
* ``L2Omega`` — the weighted sequence space with weight 1/(n(n+1)) on entry
  x(n) (n from 1); position i of ``coeffs`` stores x(i+1).

Sequences may carry an eventual-constant tail: all coefficients at indices
>= N equal ``tail_constant``.  This makes 1/(1-z), images of polynomials
under the Hardy-to-Bergman map, and the all-ones sequence exact objects.
A nonzero constant tail has infinite H^2 norm, so it is rejected there.

Inner products use compensated summation plus the exact closed-form tail
contribution t_f*t_g/(N+1) (telescoping of both weight families).  The
``trunc_bound`` field carries a norm bound on whatever an upstream
construction dropped beyond the stored data, so downstream consumers can
certify results.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._accum import comp_dot_w, comp_sum

#: Default truncation length for series constructors.
DEFAULT_N = 2 ** 16


class Space(enum.Enum):
    H2 = "H2"
    BergmanA = "BergmanA"
    L2Omega = "L2Omega"


class SpaceMismatchError(ValueError):
    """Operands live in different coefficient spaces."""


def weights(space: Space, n0: int, n1: int) -> np.ndarray:
    """Weight of coefficient positions n0..n1-1 in the given space.

    Positions are array positions: for L2Omega position i carries sequence
    entry x(i+1) with weight 1/((i+1)(i+2)), which coincides with the
    BergmanA weight at the same position.
    """
    n = np.arange(n0, n1, dtype=np.float64)
    if space is Space.H2:
        return np.ones_like(n)
    return 1.0 / ((n + 1.0) * (n + 2.0))


def weight_at(space: Space, n: int) -> float:
    if space is Space.H2:
        return 1.0
    return 1.0 / ((n + 1.0) * (n + 2.0))


def tail_weight_total(space: Space, n: int) -> float:
    """Exact value of sum of weights over positions >= n (telescoping)."""
    if space is Space.H2:
        return math.inf
    return 1.0 / (n + 1.0)


@dataclass(frozen=True)
class CoeffSeq:
    """Immutable truncated coefficient vector with space tag and tail."""

    coeffs: np.ndarray
    space: Space
    tail_constant: float = 0.0
    #: norm bound (in ``space``) on data dropped beyond the stored range.
    trunc_bound: float = 0.0

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 1:
            raise ValueError("CoeffSeq needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        if not isinstance(self.space, Space):
            raise TypeError("space must be a Space enum member")
        t = float(self.tail_constant)
        if not math.isfinite(t):
            raise ValueError("tail_constant must be finite")
        if self.space is Space.H2 and t != 0.0:
            raise ValueError("a nonzero constant tail has infinite H2 norm")
        b = float(self.trunc_bound)
        if not (b >= 0.0 and math.isfinite(b)):
            raise ValueError("trunc_bound must be finite and >= 0")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "tail_constant", t)
        object.__setattr__(self, "trunc_bound", b)

    @property
    def n(self) -> int:
        return self.coeffs.size

    def coeff(self, j: int) -> float:
        """Coefficient at index j, using the tail beyond the stored range."""
        if j < 0:
            raise IndexError("negative coefficient index")
        return float(self.coeffs[j]) if j < self.n else self.tail_constant

    def is_zero(self) -> bool:
        return self.tail_constant == 0.0 and not np.any(self.coeffs)

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        obj = {
            "space": self.space.value,
            "n": self.n,
            "coeffs": self.coeffs.tolist(),
            "tail": self.tail_constant,
        }
        if self.trunc_bound:
            obj["trunc_bound"] = self.trunc_bound
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "CoeffSeq":
        obj = json.loads(text)
        coeffs = np.asarray(obj["coeffs"], dtype=np.float64)
        if int(obj.get("n", coeffs.size)) != coeffs.size:
            raise ValueError("declared length does not match coefficient count")
        return cls(coeffs, Space(obj["space"]), float(obj.get("tail", 0.0)),
                   float(obj.get("trunc_bound", 0.0)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        for i, v in enumerate(self.coeffs):
            w.writerow([i, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, space: Space, tail_constant: float = 0.0) -> "CoeffSeq":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["index", "value"]:
            raise ValueError("expected header 'index,value'")
        vals = np.empty(len(rows) - 1)
        for i, row in enumerate(rows[1:]):
            if int(row[0]) != i:
                raise ValueError(f"non-contiguous index at row {i + 1}")
            vals[i] = float(row[1])
        return cls(vals, space, tail_constant)


def _check_same_space(f: CoeffSeq, g: CoeffSeq) -> None:
    if f.space is not g.space:
        raise SpaceMismatchError(f"{f.space.value} vs {g.space.value}")


def pad_to(f: CoeffSeq, n: int) -> CoeffSeq:
    """Extend (with the tail constant) or truncate the stored range to n.

    Truncating below the stored range is only exact when the dropped
    entries already equal the tail constant; the inexactness is folded
    into ``trunc_bound``.
    """
    if n == f.n:
        return f
    if n > f.n:
        out = np.full(n, f.tail_constant)
        out[:f.n] = f.coeffs
        return replace(f, coeffs=out)
    dropped = f.coeffs[n:] - f.tail_constant
    extra = math.sqrt(comp_dot_w(dropped, dropped, weights(f.space, n, f.n)))
    return replace(f, coeffs=f.coeffs[:n].copy(),
                   trunc_bound=f.trunc_bound + extra)


def inner_product(f: CoeffSeq, g: CoeffSeq) -> float:
    """Weighted inner product with exact eventual-constant tail handling.

    Mixed lengths are padded with the shorter operand's tail constant.
    The tail beyond max(N_f, N_g) contributes t_f*t_g/(N+1) exactly.
    """
    _check_same_space(f, g)
    n = max(f.n, g.n)
    f, g = pad_to(f, n), pad_to(g, n)
    finite = comp_dot_w(f.coeffs, g.coeffs, weights(f.space, 0, n))
    tail = f.tail_constant * g.tail_constant
    if tail != 0.0:
        finite += tail * tail_weight_total(f.space, n)
    return finite


def inner_product_error_bound(f: CoeffSeq, g: CoeffSeq) -> float:
    """Cauchy-Schwarz bound on the inner-product error from dropped tails."""
    return (f.trunc_bound * norm(g) + g.trunc_bound * norm(f)
            + f.trunc_bound * g.trunc_bound)


def norm(f: CoeffSeq) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


def evaluate(f: CoeffSeq, z: complex) -> complex:
    """Value at a point of the open unit disk.

    Horner evaluation of the stored polynomial plus the geometric closed
    form t * z^N / (1-z) for the constant tail.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("evaluation point must satisfy |z| < 1")
    val = complex(np.polynomial.polynomial.polyval(z, f.coeffs))
    if f.tail_constant != 0.0:
        val += f.tail_constant * z ** f.n / (1.0 - z)
    return val


def point_eval_bound(n_start: int, z: complex, tail_norm: float) -> float:
    """Bound |g(z)| for g supported on coefficients >= n_start with ||g|| <= tail_norm.

    Cauchy-Schwarz against the H2 reproducing kernel restricted to the
    tail: tail_norm * |z|^n_start / sqrt(1 - |z|^2).
    """
    r = abs(z)
    if r >= 1.0:
        raise ValueError("evaluation point must satisfy |z| < 1")
    return tail_norm * r ** n_start / math.sqrt(1.0 - r * r)


def evaluate_with_bound(f: CoeffSeq, z: complex) -> tuple[complex, float]:
    """Evaluate plus the truncation-error bound from ``trunc_bound``."""
    return evaluate(f, z), point_eval_bound(f.n, z, f.trunc_bound)


def scale(alpha: float, f: CoeffSeq) -> CoeffSeq:
    alpha = float(alpha)
    return replace(f, coeffs=alpha * f.coeffs,
                   tail_constant=alpha * f.tail_constant,
                   trunc_bound=abs(alpha) * f.trunc_bound)


def axpy(alpha: float, f: CoeffSeq, g: CoeffSeq) -> CoeffSeq:
    """alpha*f + g, exact coefficientwise; tails and bounds combine linearly."""
    _check_same_space(f, g)
    alpha = float(alpha)
    n = max(f.n, g.n)
    f, g = pad_to(f, n), pad_to(g, n)
    return CoeffSeq(alpha * f.coeffs + g.coeffs, f.space,
                    alpha * f.tail_constant + g.tail_constant,
                    abs(alpha) * f.trunc_bound + g.trunc_bound)


def add(f: CoeffSeq, g: CoeffSeq) -> CoeffSeq:
    return axpy(1.0, f, g)


def subtract(f: CoeffSeq, g: CoeffSeq) -> CoeffSeq:
    return axpy(-1.0, g, f)


def shift_pad(f: CoeffSeq, shift: int = 0, n: int | None = None) -> CoeffSeq:
    """Prepend ``shift`` zero coefficients, then pad/truncate to length n.

    Data plumbing only; the H2 shift *operator* (with its truncation
    bookkeeping) lives in hardyops.
    """
    if shift < 0:
        raise ValueError("shift must be >= 0")
    if shift:
        if f.tail_constant != 0.0:
            raise ValueError("cannot shift a sequence with a nonzero constant tail")
        out = np.concatenate([np.zeros(shift), f.coeffs])
        f = replace(f, coeffs=out)
    return pad_to(f, n) if n is not None else f


def zeros(n: int, space: Space) -> CoeffSeq:
    return CoeffSeq(np.zeros(n), space)
