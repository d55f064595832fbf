"""Initialization by l_p-norm minimization of the sidelobes.

For a fixed ``p`` the function ``sum_k |r_k|^p`` is decreased by
majorization-minimization: around the current sidelobe moduli ``x_k`` each
term ``|r_k|^p`` is bounded above by ``tau_k |r_k|^2 + lam_k |r_k|`` (plus a
constant), tight at ``x_k``, with

    t     = (sum_k x_k^p)^(1/p)
    tau_k = (t^p - x_k^p - p x_k^(p-1) (t - x_k)) / (t - x_k)^2
    lam_k = p x_k^(p-1) - 2 tau_k x_k  (<= 0).

On the continuous circle ``|r_k|`` is further bounded below by
``Re(r_k conj(s_k))`` with ``s_k`` the current unit sidelobe direction,
which turns the coordinate subproblem into a single quartic ratio in
``beta = tan(phi/2)``; its minimizer is found among the roots of a quartic.
On M-ary alphabets the first bound is minimized exhaustively.

A schedule of growing ``p`` (2, 4, ..., 8192 by default) drifts the design
from ISL-like to PSL-like behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .context import CodeState, CoordinateContext, EntryResult, as_context
from .continuous import GUARD, lag_quartics
from .core import TWO_PI, AutocorrVector, PhaseSequence, lp_norm
from .discrete import dft_lag_table, pick_index
from .errors import AlphabetMismatchError
from .quartic import real_roots

DEFAULT_SCHEDULE = tuple(2.0**j for j in range(1, 14))
SERIES_LIMIT = 0.1


@dataclass(frozen=True)
class SurrogateWeights:
    """Majorizer weights, rescaled so that ``max(tau) = 1``.

    The unscaled weights are ``tau * exp(log_scale)`` and
    ``lam * exp(log_scale)``; the rescaling leaves every coordinate
    minimizer unchanged and keeps ``p`` in the thousands representable.
    """

    tau: np.ndarray
    lam: np.ndarray
    t: float
    p: float
    log_scale: float = 0.0
    direction: np.ndarray = field(default=None, repr=False)

    def raw(self) -> tuple[np.ndarray, np.ndarray]:
        s = math.exp(self.log_scale)
        return self.tau * s, self.lam * s


def _tau_normalized(xh, th, S, p):
    """tau for moduli ``xh <= th`` already divided by the largest modulus."""
    tau = np.empty_like(xh)
    zero = xh == 0.0
    tau[zero] = th ** (p - 2.0)
    nz = ~zero
    x = xh[nz]
    u = (th - x) / x
    series = p * u < SERIES_LIMIT
    out = np.empty_like(x)
    # (1+u)^p - 1 - p u = sum_{j>=2} C(p,j) u^j, summed while terms matter
    if np.any(series):
        us = u[series]
        term = np.full_like(us, p * (p - 1.0) / 2.0)
        acc = term.copy()
        for j in range(3, 60):
            term = term * (p - j + 1.0) / j * us
            acc += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
                break
        out[series] = x[series] ** (p - 2.0) * acc
    direct = ~series
    if np.any(direct):
        xd = x[direct]
        xp = xd**p
        num = S - xp - p * xd ** (p - 1.0) * (th - xd)
        out[direct] = num / (th - xd) ** 2
    tau[nz] = out
    return tau


def surrogate_weights(r, p: float) -> SurrogateWeights:
    """Weights of the quadratic-in-``|r_k|`` majorizer of ``sum_k |r_k|^p``.

    Parameters
    ----------
    r : AutocorrVector, PhaseSequence or complex array
        Current sidelobes r_1..r_{N-1}.
    p : float
        Norm exponent, ``p >= 2``.  For ``p = 2`` the majorizer is exact:
        ``tau = 1`` and ``lam = 0``.
    """
    if isinstance(r, AutocorrVector):
        r = r.r
    elif isinstance(r, PhaseSequence):
        from .core import autocorrelation

        r = autocorrelation(r).r
    r = np.asarray(r)
    p = float(p)
    if p < 2.0:
        raise ValueError("the surrogate needs p >= 2")
    mod = np.abs(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(mod > 0, np.conj(r) / np.where(mod > 0, mod, 1.0), 0.0)
    m = float(mod.max())
    if p == 2.0 or m == 0.0:
        t = float(np.sqrt(np.sum(mod**2)))
        return SurrogateWeights(np.ones_like(mod), np.zeros_like(mod), t, p, 0.0, direction)
    xh = mod / m
    S = float(np.sum(xh**p))
    th = S ** (1.0 / p)
    tau = _tau_normalized(xh, th, S, p)
    lam = (p * xh ** (p - 1.0) - 2.0 * tau * xh) * m
    top = float(tau.max())
    return SurrogateWeights(
        tau / top, lam / top, th * m, p, (p - 2.0) * math.log(m) + math.log(top), direction
    )


def direction_quartics(ctx: CoordinateContext, s: np.ndarray) -> np.ndarray:
    """Numerators of ``Re(conj(rho_k(u)) s_k)`` in ``beta``, shape (N-1, 5).

    ``s`` holds unit directions in the conjugate orientation of
    :class:`CoordinateContext` (zero for vanishing sidelobes).
    """
    at = np.conj(ctx.a) * s
    bt = np.conj(ctx.b) * s
    ct = np.conj(ctx.c) * s
    out = np.empty((ctx.a.size, 5))
    lin = 2.0 * (at.imag - bt.imag)
    out[:, 0] = ct.real - at.real - bt.real
    out[:, 1] = lin
    out[:, 2] = 2.0 * ct.real
    out[:, 3] = lin
    out[:, 4] = at.real + bt.real + ct.real
    return out


def _numerator(ctx, w):
    P = lag_quartics(ctx)
    num = w.tau @ P
    if np.any(w.lam):
        num = num + w.lam @ direction_quartics(ctx, w.direction)
    return num


def _surrogate_at(ctx, w, phi):
    u = np.exp(1j * np.asarray(phi, dtype=float))[..., None]
    rho = ctx.a * u + ctx.b * np.conj(u) + ctx.c
    lin = (np.conj(rho) * w.direction).real
    return ((rho.real**2 + rho.imag**2) * w.tau + lin * w.lam).sum(axis=-1)


def stationary_quartic(num: np.ndarray) -> np.ndarray:
    """Zeros of d/dbeta [num(beta)/(1+beta^2)^2] as a quartic (highest first)."""
    n4, n3, n2, n1, n0 = num
    return np.array([-n3, 4.0 * n4 - 2.0 * n2, 3.0 * n3 - 3.0 * n1, 2.0 * n2 - 4.0 * n0, n1])


def _state_weights(seq, p):
    r = seq.r if isinstance(seq, CodeState) else None
    if r is None:
        from .core import autocorrelation

        r = autocorrelation(seq).r
    return surrogate_weights(r, p)


def lp_entry_continuous(seq, d: int, weights: SurrogateWeights | None = None, p: float | None = None) -> EntryResult:
    """Minimize the continuous surrogate over entry ``d``.

    The candidates are the real stationary points of the quartic ratio,
    ``phi = pi`` and the current phase; the current phase wins ties.
    ``value`` and ``previous`` are surrogate values (in the rescaled units
    of ``weights``).
    """
    if not seq.alphabet.is_continuous:
        raise AlphabetMismatchError("alphabet-mismatch: continuous surrogate step on a discrete code")
    if weights is None:
        weights = _state_weights(seq, p)
    ctx = as_context(seq, d)
    phi0 = float(seq.values[d]) if hasattr(seq, "values") else float(seq.phases[d])
    num = _numerator(ctx, weights)
    stat = stationary_quartic(num)
    cands = [math.pi]
    if np.any(stat):
        cands += [2.0 * math.atan(b) for b in real_roots(stat)]
    vals = _surrogate_at(ctx, weights, np.array([phi0] + cands))
    cur = float(vals[0])
    j = int(np.argmin(vals[1:])) + 1
    best, phi = cur, phi0
    span = np.abs(ctx.a) + np.abs(ctx.b) + np.abs(ctx.c)
    scale = float(np.sum(weights.tau * span**2 + np.abs(weights.lam) * span))
    if vals[j] < cur - GUARD * scale:
        best, phi = float(vals[j]), ([phi0] + cands)[j]
    return EntryResult(d, best, cur, phase=float(np.mod(phi, TWO_PI)))


def lp_entry_discrete(seq, d: int, weights: SurrogateWeights | None = None, p: float | None = None) -> EntryResult:
    """Minimize ``sum_k tau_k |r_k|^2 + lam_k |r_k|`` over the alphabet for entry ``d``."""
    if seq.alphabet.is_continuous:
        raise AlphabetMismatchError("alphabet-mismatch: discrete surrogate step on a continuous code")
    if weights is None:
        weights = _state_weights(seq, p)
    ctx = as_context(seq, d)
    nu = dft_lag_table(ctx, seq.alphabet.m)
    y = np.sum(weights.tau[:, None] * nu + weights.lam[:, None] * np.sqrt(nu), axis=0)
    cur = int(seq.values[d]) if hasattr(seq, "values") else int(seq.indices[d])
    i = pick_index(y, cur)
    return EntryResult(d, float(y[i]), float(y[cur]), index=i)


@dataclass
class LpStage:
    p: float
    sweeps: int
    norms: list


def lp_sweep(state: CodeState, p: float) -> int:
    """One cyclic pass of surrogate steps, weights refreshed before every step.

    Returns the number of entries that changed.
    """
    step = lp_entry_continuous if state.alphabet.is_continuous else lp_entry_discrete
    changed = 0
    for d in range(state.n):
        w = surrogate_weights(state.r, p)
        res = step(state, d, w)
        if res.entry != state.values[d]:
            state.set_entry(d, res.entry)
            changed += 1
    state.refresh()
    return changed


def lp_schedule_run(
    seq0: PhaseSequence,
    schedule=DEFAULT_SCHEDULE,
    inner_eps: float = 1e-5,
    max_sweeps: int = 100,
    history: list | None = None,
) -> PhaseSequence:
    """Warm-started surrogate descent for each ``p`` of ``schedule``.

    A stage ends when a sweep improves the l_p norm by less than
    ``inner_eps`` or after ``max_sweeps`` sweeps.

    Parameters
    ----------
    seq0 : PhaseSequence
    schedule : sequence of float
        Strictly increasing exponents starting at 2.
    inner_eps : float
    max_sweeps : int
    history : list, optional
        Receives one :class:`LpStage` per exponent.
    """
    schedule = [float(p) for p in schedule]
    if not schedule or schedule[0] != 2.0 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing and start at 2")
    state = CodeState(seq0)
    for p in schedule:
        norms = [lp_norm(state.r, p)]
        sweeps = 0
        while sweeps < max_sweeps:
            lp_sweep(state, p)
            sweeps += 1
            norms.append(lp_norm(state.r, p))
            if norms[-2] - norms[-1] < inner_eps:
                break
        if history is not None:
            history.append(LpStage(p, sweeps, norms))
    return state.sequence()
