"""Unimodular sequences, their aperiodic autocorrelation and sidelobe metrics.

A code of length N is stored by its phases only, so ``|x_i| = 1`` holds by
construction.  Discrete (M-ary) codes keep the integer alphabet index ``j``
of each entry, ``phi = 2*pi*j/M``, which keeps alphabet membership exact.

The autocorrelation follows the matched-filter convention

    r_k = sum_{i=1}^{N-k} conj(x_i) x_{i+k},   k = 0, ..., N-1

and only the non-negative lags are kept.  PSL and ISL are returned in linear
units; dB conversions live in the CLI layer.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FrankLengthError, SchemaError, SequenceError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Alphabet:
    """Phase alphabet: ``m=None`` is the continuous circle, otherwise M-ary."""

    m: int | None = None

    def __post_init__(self):
        if self.m is not None and (int(self.m) != self.m or self.m < 2):
            raise SequenceError(f"alphabet size must be an integer >= 2, got {self.m}")

    @classmethod
    def continuous(cls) -> Alphabet:
        return cls(None)

    @classmethod
    def discrete(cls, m: int) -> Alphabet:
        return cls(int(m))

    @classmethod
    def binary(cls) -> Alphabet:
        return cls(2)

    @classmethod
    def parse(cls, text: str) -> Alphabet:
        """Parse ``continuous``, ``binary`` or ``m:<int>``."""
        t = text.strip().lower()
        if t in ("continuous", "inf", "cont"):
            return cls.continuous()
        if t == "binary":
            return cls.binary()
        if t.startswith("m:"):
            try:
                return cls.discrete(int(t[2:]))
            except ValueError:
                pass
        raise SequenceError(f"cannot parse alphabet {text!r}")

    @property
    def is_continuous(self) -> bool:
        return self.m is None

    @property
    def is_binary(self) -> bool:
        return self.m == 2

    def __str__(self):
        if self.m is None:
            return "continuous"
        return "binary" if self.m == 2 else f"m:{self.m}"


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class PhaseSequence:
    """Immutable length-N unimodular code.

    Build with :meth:`from_phases` (continuous), :meth:`from_indices`
    (M-ary) or :meth:`from_signs` (binary, +1/-1).
    """

    __slots__ = ("_alphabet", "_values")

    def __init__(self, values, alphabet: Alphabet):
        values = np.asarray(values)
        if values.ndim != 1 or values.size < 2:
            raise SequenceError("a code needs N >= 2 entries")
        if alphabet.is_continuous:
            values = values.astype(np.float64)
            if not np.all(np.isfinite(values)):
                raise SequenceError("phases must be finite")
        else:
            if not np.issubdtype(values.dtype, np.integer):
                raise SequenceError("discrete codes are stored as integer indices")
            values = values.astype(np.int64)
            if values.min() < 0 or values.max() >= alphabet.m:
                raise SequenceError(f"indices must lie in [0, {alphabet.m - 1}]")
        self._alphabet = alphabet
        self._values = _readonly(values)

    @classmethod
    def from_phases(cls, phases) -> PhaseSequence:
        return cls(np.asarray(phases, dtype=np.float64), Alphabet.continuous())

    @classmethod
    def from_indices(cls, indices, m: int) -> PhaseSequence:
        return cls(np.asarray(indices, dtype=np.int64), Alphabet.discrete(m))

    @classmethod
    def from_signs(cls, signs) -> PhaseSequence:
        signs = np.asarray(signs)
        if not np.all(np.abs(signs) == 1):
            raise SequenceError("binary codes need entries in {+1, -1}")
        return cls((signs < 0).astype(np.int64), Alphabet.binary())

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self):
        return self.n

    @property
    def indices(self) -> np.ndarray | None:
        return None if self._alphabet.is_continuous else self._values

    @property
    def phases(self) -> np.ndarray:
        if self._alphabet.is_continuous:
            return self._values
        return _readonly(TWO_PI * self._values / self._alphabet.m)

    @property
    def x(self) -> np.ndarray:
        """Complex entries ``exp(j*phi)``."""
        if self._alphabet.is_binary:
            return 1.0 - 2.0 * self._values.astype(np.complex128)
        return np.exp(1j * self.phases)

    def with_entry(self, d: int, value) -> PhaseSequence:
        v = np.array(self._values)
        v[d] = value
        return PhaseSequence(v, self._alphabet)

    def __eq__(self, other):
        if not isinstance(other, PhaseSequence):
            return NotImplemented
        return self._alphabet == other._alphabet and np.array_equal(
            self._values, other._values
        )

    def __hash__(self):
        return hash((self._alphabet, self._values.tobytes()))

    def __repr__(self):
        return f"PhaseSequence(n={self.n}, alphabet={self._alphabet})"


@dataclass(frozen=True)
class AutocorrVector:
    """Sidelobes ``r[k-1] = r_k`` for k = 1..N-1 plus the mainlobe ``r0``."""

    r: np.ndarray
    r0: float

    @property
    def n(self) -> int:
        return self.r.size + 1


def _as_complex(seq):
    if isinstance(seq, PhaseSequence):
        return seq.x
    return np.asarray(seq, dtype=np.complex128)


def autocorrelation(seq) -> AutocorrVector:
    """Aperiodic autocorrelation by direct summation.

    Accepts a :class:`PhaseSequence` or a complex vector.
    """
    x = _as_complex(seq)
    n = x.size
    # np.correlate(x, x)[n-1+k] = sum_i x[i+k] conj(x[i])
    full = np.correlate(x, x, mode="full")
    r = _readonly(full[n:])
    r0 = float(n) if isinstance(seq, PhaseSequence) else float(np.vdot(x, x).real)
    return AutocorrVector(r, r0)


def autocorrelation_fft(seq) -> np.ndarray:
    """Sidelobes r_1..r_{N-1} through a zero-padded FFT."""
    x = _as_complex(seq)
    n = x.size
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    X = np.fft.fft(x, nfft)
    c = np.fft.ifft(X * np.conj(X))
    return c[1:n]


def _sidelobes(r):
    if isinstance(r, AutocorrVector):
        return r.r
    if isinstance(r, PhaseSequence):
        return autocorrelation(r).r
    return np.asarray(r)


def psl(r) -> float:
    """Peak sidelobe level ``max_k |r_k|``."""
    return float(np.max(np.abs(_sidelobes(r))))


def isl(r) -> float:
    """Integrated sidelobe level ``sum_k |r_k|^2`` (one-sided)."""
    s = _sidelobes(r)
    return float(np.sum(s.real**2 + s.imag**2))


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"Pareto weight must lie in [0, 1], got {theta}")
    return theta


def objective_from_sidelobes(r, theta: float) -> float:
    s = np.asarray(r)
    p = s.real**2 + s.imag**2
    return float(theta * np.max(p) + (1.0 - theta) * np.sum(p))


def objective_f_theta(seq, theta: float) -> float:
    """Scalarized objective ``theta*PSL^2 + (1-theta)*ISL``."""
    return objective_from_sidelobes(_sidelobes(seq), check_theta(theta))


def lp_norm(r, p: float) -> float:
    """``(sum_k |r_k|^p)^(1/p)``, evaluated without overflow for large p."""
    a = np.abs(_sidelobes(r))
    m = a.max()
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


# -- generators ---------------------------------------------------------------


def frank_phases(n: int) -> np.ndarray:
    """Frank code, ``phi = 2*pi*m*k/L`` for m, k = 0..L-1 taken row-major."""
    L = math.isqrt(n)
    if L * L != n:
        raise FrankLengthError(f"frank-length-not-square: N={n} is not a perfect square")
    m, k = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    return (TWO_PI / L) * (m * k).ravel()


def golomb_phases(n: int) -> np.ndarray:
    """Golomb polyphase code, ``phi_n = pi*n*(n-1)/N`` for n = 1..N."""
    k = np.arange(1, n + 1)
    return math.pi * k * (k - 1) / n


def _quantize(phases, m):
    return np.mod(np.rint(np.asarray(phases) * m / TWO_PI).astype(np.int64), m)


def generate(kind: str, n: int, alphabet: Alphabet | None = None, seed=None) -> PhaseSequence:
    """Build a starting code.

    Parameters
    ----------
    kind : {"frank", "golomb", "random", "binary-random"}
    n : int
        Code length.
    alphabet : Alphabet, optional
        Target alphabet, continuous by default.  Frank and Golomb phases are
        rounded to the nearest alphabet point for discrete alphabets.
        ``binary-random`` always yields a binary code.
    seed : int, optional
        Seed of the ``numpy`` generator used by the random kinds.
    """
    alphabet = alphabet or Alphabet.continuous()
    if n < 2:
        raise SequenceError("a code needs N >= 2 entries")
    kind = kind.lower()
    if kind in ("frank", "golomb"):
        ph = frank_phases(n) if kind == "frank" else golomb_phases(n)
        if alphabet.is_continuous:
            return PhaseSequence.from_phases(np.mod(ph, TWO_PI))
        return PhaseSequence.from_indices(_quantize(ph, alphabet.m), alphabet.m)
    rng = np.random.default_rng(seed)
    if kind == "binary-random":
        return PhaseSequence.from_indices(rng.integers(0, 2, n), 2)
    if kind == "random":
        if alphabet.is_continuous:
            return PhaseSequence.from_phases(rng.uniform(0.0, TWO_PI, n))
        return PhaseSequence.from_indices(rng.integers(0, alphabet.m, n), alphabet.m)
    raise SequenceError(f"unknown generator kind {kind!r}")


# -- file formats ---------------------------------------------------------------


def sequence_to_dict(seq: PhaseSequence) -> dict:
    out = {"n": seq.n}
    if seq.alphabet.is_continuous:
        out["alphabet"] = "continuous"
        out["phases"] = [float(v) for v in seq.phases]
    else:
        out["alphabet"] = {"discrete": seq.alphabet.m}
        out["phases"] = [float(v) for v in seq.phases]
        out["indices"] = [int(v) for v in seq.indices]
    return out


def sequence_from_dict(data) -> PhaseSequence:
    if not isinstance(data, dict):
        raise SchemaError("<root>", "expected a JSON object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise SchemaError("n", "must be an integer >= 2")
    alpha = data.get("alphabet")
    if alpha == "continuous":
        alphabet = Alphabet.continuous()
    elif isinstance(alpha, dict) and set(alpha) == {"discrete"}:
        m = alpha["discrete"]
        if not isinstance(m, int) or isinstance(m, bool) or m < 2:
            raise SchemaError("alphabet", "discrete size must be an integer >= 2")
        alphabet = Alphabet.discrete(m)
    else:
        raise SchemaError("alphabet", 'expected "continuous" or {"discrete": M}')

    phases = data.get("phases")
    if not isinstance(phases, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in phases
    ):
        raise SchemaError("phases", "expected a list of numbers")
    if len(phases) != n:
        raise SchemaError("phases", f"length {len(phases)} does not match n={n}")
    if alphabet.is_continuous:
        return PhaseSequence.from_phases(phases)

    indices = data.get("indices")
    if not isinstance(indices, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in indices
    ):
        raise SchemaError("indices", "expected a list of integers")
    if len(indices) != n:
        raise SchemaError("indices", f"length {len(indices)} does not match n={n}")
    if any(v < 0 or v >= alphabet.m for v in indices):
        raise SchemaError("indices", f"values must lie in [0, {alphabet.m - 1}]")
    expected = TWO_PI * np.asarray(indices) / alphabet.m
    if np.max(np.abs(np.asarray(phases, dtype=float) - expected)) > 1e-9:
        raise SchemaError("phases", "inconsistent with indices")
    return PhaseSequence.from_indices(indices, alphabet.m)


def save_sequence(seq: PhaseSequence, path, **extra) -> None:
    data = sequence_to_dict(seq)
    data.update(extra)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def load_sequence(path) -> PhaseSequence:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"not valid JSON ({exc.msg})") from exc
    return sequence_from_dict(data)


def write_acf_csv(seq: PhaseSequence, path, extra_columns: dict | None = None) -> None:
    """Full ACF table with columns ``lag,k,re,im,abs`` for k = 0..N-1."""
    ac = autocorrelation(seq)
    r = np.concatenate([[ac.r0], ac.r])
    extra_columns = extra_columns or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lag", "k", "re", "im", "abs", *extra_columns])
        for k, v in enumerate(r):
            w.writerow([k, k, repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v))),
                        *extra_columns.values()])
