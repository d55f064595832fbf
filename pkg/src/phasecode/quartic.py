"""Real quartic polynomials and finite unions of open intervals.

This is the machinery behind the bisection feasibility test of the
continuous coordinate solver: roots of a quartic, the open set where it is
strictly positive, and the union of such sets.

Coefficients are stored highest degree first, as in :func:`numpy.polyval`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ZeroPolynomialError


@dataclass(frozen=True)
class QuarticPoly:
    """``a*x^4 + b*x^3 + c*x^2 + d*x + e``."""

    coeffs: tuple

    def __init__(self, coeffs):
        c = np.zeros(5)
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.size > 5:
            raise ValueError("a quartic has at most 5 coefficients")
        c[5 - coeffs.size:] = coeffs
        object.__setattr__(self, "coeffs", tuple(float(v) for v in c))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def __call__(self, x):
        return np.polyval(self.array, x)

    def derivative(self, m: int = 1) -> QuarticPoly:
        return QuarticPoly(np.polyder(self.array, m) if m < 5 else [0.0])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        return QuarticPoly(self.array + np.asarray(other.coeffs))

    def __sub__(self, other):
        return QuarticPoly(self.array - np.asarray(other.coeffs))

    def __mul__(self, s):
        return QuarticPoly(self.array * float(s))

    __rmul__ = __mul__


def _coeff_array(p):
    c = np.array(p.coeffs if isinstance(p, QuarticPoly) else p, dtype=np.float64)
    if c.shape != (5,):
        c = QuarticPoly(c).array
    return c


def real_roots(p: QuarticPoly | np.ndarray, tol: float | None = None) -> list[float]:
    """Distinct real roots, ascending.

    Closed form (Cardano / Ferrari) with Newton polishing; the companion
    matrix is consulted when the roots are nearly coincident.  Leading
    coefficients below ``tol * max|coef|`` (default ``1e-12``) are dropped,
    so cubics, quadratics and lines are handled too.

    Raises
    ------
    ZeroPolynomialError
        All coefficients are zero.
    """
    c = _coeff_array(p)
    out = np.empty(4)
    n = _kernels.real_roots_trim(c, out, _kernels.TRIM if tol is None else float(tol))
    if n < 0:
        raise ZeroPolynomialError("zero-polynomial")
    return [float(v) for v in out[:n]]


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint, sorted open intervals ``(lo, hi)``; endpoints may be infinite."""

    intervals: tuple = ()

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        for (a, b) in iv:
            if not a < b:
                raise ValueError(f"empty interval ({a}, {b})")
        for (_, b), (c, _) in zip(iv, iv[1:]):
            if not b <= c:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", iv)

    @classmethod
    def real_line(cls) -> IntervalSet:
        return cls(((-math.inf, math.inf),))

    def __contains__(self, x) -> bool:
        return any(a < x < b for a, b in self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


def _union_arrays(lo, hi):
    n = lo.size
    out_lo = np.empty(max(n, 1))
    out_hi = np.empty(max(n, 1))
    m = _kernels.union_sweep(lo, hi, n, out_lo, out_hi)
    return IntervalSet(tuple(zip(out_lo[:m], out_hi[:m])))


def strict_positive_set(p: QuarticPoly | np.ndarray) -> IntervalSet:
    """The open set ``{x : p(x) > 0}``.

    The sorted real roots cut the line into pieces of constant sign.  Each
    bounded piece is classified at its midpoint, falling back to the first
    non-vanishing derivative at its left root when the midpoint value is
    below rounding level.  The two unbounded pieces follow the leading term.

    Raises
    ------
    ZeroPolynomialError
        All coefficients are zero.
    """
    c = _coeff_array(p)
    if not np.any(c):
        raise ZeroPolynomialError("zero-polynomial")
    lo = np.empty(10)
    hi = np.empty(10)
    n = _kernels.positive_intervals(c, lo, hi, 0)
    return _union_arrays(lo[:n], hi[:n])


def union(sets) -> IntervalSet:
    """Set union of several :class:`IntervalSet` as one disjoint sorted set."""
    pairs = [iv for s in sets for iv in s.intervals]
    if not pairs:
        return IntervalSet()
    arr = np.array(pairs, dtype=np.float64)
    return _union_arrays(np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]))


def covers_reals(s: IntervalSet) -> bool:
    return s.intervals == ((-math.inf, math.inf),)


def complement_witness(s: IntervalSet) -> float | None:
    """A point outside ``s``, from its lowest gap; ``None`` if ``s`` is R.

    Bounded gaps give their midpoint (the point itself for a single-point
    gap), unbounded ones the finite endpoint -/+ 1.
    """
    iv = s.intervals
    if not iv:
        return 0.0
    lo = np.array([a for a, _ in iv])
    hi = np.array([b for _, b in iv])
    found, x = _kernels.first_gap(lo, hi, len(iv))
    return float(x) if found else None
