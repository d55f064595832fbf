"""Exhaustive optimization of one entry over an M-ary phase alphabet.

At the alphabet points ``phi_i = 2*pi*i/M`` the squared sidelobe of lag k is

    |a u + b conj(u) + c|^2 = |a + c e^{-j phi_i} + b e^{-2j phi_i}|^2,

the squared modulus of the M-point DFT of ``[a, c, b, 0, ..., 0]``.  One FFT
per lag therefore scores every candidate at once.  For binary codes
(M = 2) the sidelobes are real and ``r_k = (a + b) x_d + c``.
"""

from __future__ import annotations

import numpy as np

from .context import CoordinateContext, EntryResult, as_context
from .core import check_theta
from .errors import AlphabetMismatchError

TIE = 1e-12


def dft_lag_table(ctx: CoordinateContext, m: int) -> np.ndarray:
    """``nu[k, i] = |r_k|^2`` with ``x_d = exp(2j*pi*i/m)``, shape (N-1, m)."""
    m = int(m)
    if m < 2:
        raise ValueError("alphabet size must be >= 2")
    if m == 2:
        ab, c = ctx.binary
        return np.stack([(c + ab) ** 2, (c - ab) ** 2], axis=1)
    zeta = np.zeros((ctx.a.size, m), dtype=np.complex128)
    zeta[:, 0] = ctx.a
    zeta[:, 1] = ctx.c
    zeta[:, 2] = ctx.b
    F = np.fft.fft(zeta, axis=1)
    return F.real**2 + F.imag**2


def pick_index(scores: np.ndarray, current: int | None) -> int:
    """Argmin with ties resolved to ``current`` if it ties, else the smallest index.

    Two scores tie when within ``1e-12 * max(1, |min|)`` of the minimum.
    """
    best = scores.min()
    cand = np.flatnonzero(scores <= best + TIE * max(1.0, abs(best)))
    if current is not None and current in cand:
        return int(current)
    return int(cand[0])


def column_scores(nu: np.ndarray, theta: float) -> np.ndarray:
    """``max_k [theta*nu_k + (1-theta)*sum_l nu_l]`` for every alphabet point."""
    S = nu.sum(axis=0)
    if theta == 0.0:
        return S
    return (theta * nu + (1.0 - theta) * S).max(axis=0)


def _current_index(seq, d):
    return int(seq.values[d]) if hasattr(seq, "values") else int(seq.indices[d])


def dpm_entry_optimize(seq, d: int, theta: float, m: int | None = None) -> EntryResult:
    """Best alphabet index for entry ``d`` of an M-ary code.

    Parameters
    ----------
    seq : PhaseSequence or CodeState
    d : int
        0-based coordinate.
    theta : float
    m : int, optional
        Alphabet size; taken from ``seq`` when omitted and checked against
        it otherwise.
    """
    theta = check_theta(theta)
    alpha = seq.alphabet
    if alpha.is_continuous:
        raise AlphabetMismatchError("alphabet-mismatch: continuous code given to the discrete solver")
    if m is not None and int(m) != alpha.m:
        raise AlphabetMismatchError(f"alphabet-mismatch: code is M={alpha.m}, solver asked for M={m}")
    ctx = as_context(seq, d)
    nu = dft_lag_table(ctx, alpha.m)
    scores = column_scores(nu, theta)
    cur = _current_index(seq, d)
    i = pick_index(scores, cur)
    return EntryResult(d, float(scores[i]), float(scores[cur]), index=i)


def binary_entry_optimize(seq, d: int, theta: float) -> EntryResult:
    """Best sign for entry ``d`` of a binary code (index 0 is +1, 1 is -1)."""
    if not seq.alphabet.is_binary:
        raise AlphabetMismatchError("alphabet-mismatch: binary solver needs a binary code")
    return dpm_entry_optimize(seq, d, theta)

