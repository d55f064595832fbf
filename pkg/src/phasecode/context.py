"""Per-coordinate view of the autocorrelation and the mutable working state.

With every entry but ``x_d`` frozen, each sidelobe is affine in ``u = x_d``
and its conjugate.  Writing ``rho_k = sum_i x_i conj(x_{i+k}) = conj(r_k)``,

    rho_k(u) = a_k u + b_k conj(u) + c_k,
    a_k = conj(x_{d+k}),  b_k = x_{d-k}

with out-of-range entries taken as zero.  Only ``|rho_k| = |r_k|`` enters
the objectives, so the orientation is immaterial there.  Indices are
0-based throughout the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AutocorrVector,
    PhaseSequence,
    autocorrelation,
    objective_from_sidelobes,
)

DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class CoordinateContext:
    """Coefficients of ``rho_k(u) = a u + b conj(u) + c`` for lags 1..N-1."""

    d: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def rho(self, u) -> np.ndarray:
        """Sidelobes (conjugate orientation) with ``x_d`` set to ``u``."""
        return self.a * u + self.b * np.conj(u) + self.c

    def sidelobe_power(self, phi) -> np.ndarray:
        """``|r_k|^2`` at ``x_d = exp(j*phi)``; ``phi`` may be an array (last axis = lag)."""
        u = np.exp(1j * np.asarray(phi, dtype=float))[..., None]
        v = self.a * u + self.b * np.conj(u) + self.c
        return v.real**2 + v.imag**2

    def objective(self, phi, theta: float):
        """``theta*max_k|r_k|^2 + (1-theta)*sum_k|r_k|^2`` at ``x_d = exp(j*phi)``."""
        pw = self.sidelobe_power(phi)
        return theta * pw.max(axis=-1) + (1.0 - theta) * pw.sum(axis=-1)

    @property
    def binary(self) -> tuple[np.ndarray, np.ndarray]:
        """Real pair ``(a_bar, c_bar)`` with ``r_k = a_bar*x_d + c_bar`` for x_d = +/-1."""
        return (self.a + self.b).real, self.c.real


def _coefficients(x, d):
    n = x.size
    a = np.zeros(n - 1, dtype=np.complex128)
    b = np.zeros(n - 1, dtype=np.complex128)
    a[: n - 1 - d] = np.conj(x[d + 1:])
    if d > 0:
        b[:d] = x[d - 1::-1]
    return a, b


def build_context(seq, d: int, r=None) -> CoordinateContext:
    """Coefficients for coordinate ``d`` (0-based).

    Parameters
    ----------
    seq : PhaseSequence or complex array
    d : int
    r : array, optional
        Current sidelobes r_1..r_{N-1}; computed when omitted.
    """
    x = seq.x if isinstance(seq, PhaseSequence) else np.asarray(seq, dtype=np.complex128)
    n = x.size
    d = int(d)
    if not 0 <= d < n:
        raise IndexError(f"coordinate {d} out of range for N={n}")
    if r is None:
        r = autocorrelation(x).r
    a, b = _coefficients(x, d)
    xd = x[d]
    c = np.conj(r) - a * xd - b * np.conj(xd)
    return CoordinateContext(d, a, b, c)


def context_naive(seq, d: int) -> CoordinateContext:
    """Same coefficients by explicit summation over ``i != d, d-k`` (slow, for checking)."""
    x = seq.x if isinstance(seq, PhaseSequence) else np.asarray(seq, dtype=np.complex128)
    n = x.size
    a, b = _coefficients(x, d)
    c = np.zeros(n - 1, dtype=np.complex128)
    for k in range(1, n):
        for i in range(n - k):
            if i != d and i + k != d:
                c[k - 1] += x[i] * np.conj(x[i + k])
    return CoordinateContext(d, a, b, c)


class CodeState:
    """Mutable working copy of a code with cached sidelobes.

    Entry changes update the sidelobes in O(N); :meth:`refresh` recomputes
    them from scratch and reports the drift it removed.
    """

    def __init__(self, seq: PhaseSequence):
        self.alphabet = seq.alphabet
        self.values = np.array(seq.phases if seq.alphabet.is_continuous else seq.indices)
        self.x = np.array(seq.x)
        self.r = np.array(autocorrelation(self.x).r)
        self.n = self.x.size

    def _entry(self, value):
        if self.alphabet.is_continuous:
            return np.exp(1j * value)
        if self.alphabet.is_binary:
            return complex(1 - 2 * int(value))
        return np.exp(2j * np.pi * int(value) / self.alphabet.m)

    def context(self, d: int) -> CoordinateContext:
        return build_context(self.x, d, self.r)

    def set_entry(self, d: int, value, ctx: CoordinateContext | None = None) -> None:
        new = self._entry(value)
        old = self.x[d]
        if ctx is None:
            ctx = self.context(d)
        rho = ctx.a * (new - old) + ctx.b * (np.conj(new) - np.conj(old))
        self.r += np.conj(rho)
        self.x[d] = new
        self.values[d] = value

    def refresh(self) -> float:
        """Recompute sidelobes exactly; returns the max drift that was removed."""
        exact = autocorrelation(self.x).r
        drift = float(np.max(np.abs(exact - self.r))) if self.n > 1 else 0.0
        self.r = np.array(exact)
        return drift

    def objective(self, theta: float) -> float:
        return objective_from_sidelobes(self.r, theta)

    def autocorr(self) -> AutocorrVector:
        return AutocorrVector(self.r.copy(), float(self.n))

    def sequence(self) -> PhaseSequence:
        return PhaseSequence(self.values.copy(), self.alphabet)


@dataclass(frozen=True)
class EntryResult:
    """Outcome of one coordinate subproblem.

    ``value`` is the objective with the returned entry, ``previous`` the
    objective with the entry left as it was.  ``phase`` is set for
    continuous codes, ``index`` for discrete ones.
    """

    d: int
    value: float
    previous: float
    phase: float | None = None
    index: int | None = None
    iterations: int = 0

    @property
    def improvement(self) -> float:
        return self.previous - self.value

    @property
    def entry(self):
        return self.phase if self.index is None else self.index


def as_context(seq, d: int) -> CoordinateContext:
    if isinstance(seq, CodeState):
        return seq.context(d)
    return build_context(seq, d)
