"""Exact-to-tolerance optimization of one continuous phase entry.

With ``beta = tan(phi/2)`` every squared sidelobe ``|a u + b conj(u) + c|^2``
becomes a quartic in beta over ``(1 + beta^2)^2``.  The coordinate
subproblem ``min_phi max_k [theta*|r_k|^2 + (1-theta)*sum_l |r_l|^2]`` is
then solved by bisection on its optimal value: a level ``gamma`` is
attainable iff the sets where some lag quartic exceeds ``gamma*(1+beta^2)^2``
fail to cover the real line, or ``phi = pi`` (outside the chart) attains it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .context import CoordinateContext, EntryResult, as_context
from .core import TWO_PI, check_theta
from .quartic import QuarticPoly

Q_DENOM = np.array([1.0, 0.0, 2.0, 0.0, 1.0])  # (1 + beta^2)^2
GUARD = 1e-12


def lag_quartics(ctx: CoordinateContext) -> np.ndarray:
    """Numerators of ``|r_k|^2`` in ``beta``, shape (N-1, 5), highest degree first."""
    a, b, c = ctx.a, ctx.b, ctx.c
    # real part:  P cos + Q sin + C,  imaginary part: P2 cos + Q2 sin + C2
    P, Q, C = a.real + b.real, b.imag - a.imag, c.real
    P2, Q2, C2 = a.imag + b.imag, a.real - b.real, c.imag
    out = np.empty((a.size, 5))
    out[:, 0] = (C - P) ** 2 + (C2 - P2) ** 2
    out[:, 1] = 4.0 * (Q * (C - P) + Q2 * (C2 - P2))
    out[:, 2] = 4.0 * (Q**2 + Q2**2) + 2.0 * (C**2 - P**2 + C2**2 - P2**2)
    out[:, 3] = 4.0 * (Q * (C + P) + Q2 * (C2 + P2))
    out[:, 4] = (C + P) ** 2 + (C2 + P2) ** 2
    return out


def lag_quartic(ctx: CoordinateContext, k: int) -> QuarticPoly:
    """Quartic numerator of ``|r_k|^2`` for lag ``k`` (1..N-1)."""
    if not 1 <= k <= ctx.a.size:
        raise IndexError(f"lag {k} out of range")
    return QuarticPoly(lag_quartics(ctx)[k - 1])


def _weighted_rows(P, ctx, theta):
    """Rows ``theta*p_k + (1-theta)*sum_l p_l`` and an upper bound of each ratio."""
    mag = (np.abs(ctx.a) + np.abs(ctx.b) + np.abs(ctx.c)) ** 2
    S = P.sum(axis=0)
    smag = mag.sum()
    if theta == 0.0:
        return S[None, :].copy(), np.array([smag])
    return theta * P + (1.0 - theta) * S, theta * mag + (1.0 - theta) * smag


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    witness_beta: float | None
    pi_feasible: bool


def feasibility_check(P, theta: float, gamma: float, bound=None) -> Feasibility:
    """Can every weighted lag ratio be pushed to ``<= gamma`` at once?

    Parameters
    ----------
    P : array (K, 5)
        Lag quartics from :func:`lag_quartics`.
    theta : float
    gamma : float
    bound : array, optional
        Upper bounds of the weighted ratios; rows with ``bound <= gamma``
        are skipped.  Without it every row is examined.
    """
    P = np.asarray(P, dtype=np.float64)
    S = P.sum(axis=0)
    rows = np.ascontiguousarray(theta * P + (1.0 - theta) * S)
    if bound is None:
        bound = np.full(rows.shape[0], np.inf)
    found, beta = _kernels.feasibility_gap(rows, float(gamma), np.asarray(bound, dtype=np.float64))
    pi_ok = bool(rows[:, 0].max() <= gamma)
    return Feasibility(bool(found) or pi_ok, float(beta) if found else None, pi_ok)


def bisection_iterations(u0: float, eps1: float) -> int:
    """Halvings needed to shrink ``[0, u0]`` below ``eps1``: ceil(log2(u0/eps1))."""
    return max(0, math.ceil(math.log2(u0 / eps1))) if u0 > 0 else 0


def cpm_entry_optimize(seq, d: int, theta: float, eps1: float = 1e-6) -> EntryResult:
    """Best phase for entry ``d`` of a continuous code.

    Parameters
    ----------
    seq : PhaseSequence or CodeState
    d : int
        0-based coordinate.
    theta : float
        Pareto weight in [0, 1].
    eps1 : float
        Bisection accuracy on the objective value.

    Returns
    -------
    EntryResult
        ``phase`` in [0, 2*pi).  The current phase is returned unless the
        bisection witness is strictly better, so ``value <= previous``.
    """
    theta = check_theta(theta)
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    ctx = as_context(seq, d)
    phi0 = _current_phase(seq, d)
    u0 = float(ctx.objective(phi0, theta))
    P = lag_quartics(ctx)
    rows, bound = _weighted_rows(P, ctx, theta)
    rows = np.ascontiguousarray(rows)
    g_pi = float(rows[:, 0].max())
    iters, kind, beta, _w, _u = _kernels.bisect_minmax(rows, bound, u0, float(eps1), g_pi)
    phi, value = phi0, u0
    if kind:
        cand = math.pi if kind == 2 else 2.0 * math.atan(beta)
        v = float(ctx.objective(cand, theta))
        if v < u0 * (1.0 - GUARD):
            phi, value = cand, v
    return EntryResult(d, value, u0, phase=float(np.mod(phi, TWO_PI)), iterations=int(iters))


def _current_phase(seq, d):
    if hasattr(seq, "values"):
        return float(seq.values[d])
    return float(seq.phases[d])


def bisection_brackets(ctx: CoordinateContext, theta: float, u0: float, eps1: float = 1e-6):
    """The ``(w, u)`` bracket after each bisection step, computed step by step.

    Slow companion of :func:`cpm_entry_optimize` for inspecting the search.
    """
    P = lag_quartics(ctx)
    rows, bound = _weighted_rows(P, ctx, theta)
    g_pi = float(rows[:, 0].max())
    rows = np.ascontiguousarray(rows)
    w, u = 0.0, float(u0)
    out = []
    for _ in range(bisection_iterations(u0, eps1)):
        gamma = 0.5 * (u + w)
        found, _b = _kernels.feasibility_gap(rows, gamma, bound)
        if found or g_pi <= gamma:
            u = gamma
        else:
            w = gamma
        out.append((w, u))
    return out
