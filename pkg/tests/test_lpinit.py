import math
from decimal import Decimal, localcontext

import numpy as np
import pytest
from conftest import acf_loop, pick_oracle
from hypothesis import given, settings
from hypothesis import strategies as st

from phasecode import (
    DEFAULT_SCHEDULE,
    Alphabet,
    AlphabetMismatchError,
    CodeState,
    DesignConfig,
    SurrogateWeights,
    autocorrelation,
    build_context,
    cpm_entry_optimize,
    dpm_entry_optimize,
    generate,
    isl,
    lp_entry_continuous,
    lp_entry_discrete,
    lp_schedule_run,
    multi_start,
    psl,
    surrogate_weights,
)
from phasecode.driver import cd_sweep
from phasecode.lpinit import LpStage, direction_quartics, lp_sweep


def tau_reference(mods, p, prec=80):
    """Majorizer weights in high-precision decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = prec
        P = Decimal(repr(float(p)))
        xs = [Decimal(repr(float(v))) for v in mods]
        t = sum(x**P for x in xs if x > 0) ** (1 / P)
        tau, lam = [], []
        for x in xs:
            if x == 0:
                tk = t ** (P - 2)
            elif t == x:
                tk = P * (P - 1) * x ** (P - 2) / 2
            else:
                tk = (t**P - x**P - P * x ** (P - 1) * (t - x)) / (t - x) ** 2
            tau.append(tk)
            lam.append((P * x ** (P - 1) if x > 0 else 0) - 2 * tk * x)
        return [float(v) for v in tau], [float(v) for v in lam], float(t)


def test_quadratic_exponent_is_exact():
    r = autocorrelation(generate("random", 20, seed=1)).r
    w = surrogate_weights(r, 2.0)
    np.testing.assert_array_equal(w.tau, 1.0)
    np.testing.assert_array_equal(w.lam, 0.0)
    assert w.log_scale == 0.0
    assert w.t == pytest.approx(math.sqrt(np.sum(np.abs(r) ** 2)))


@pytest.mark.parametrize("p", [3.0, 4.0, 16.0, 64.0])
def test_weights_match_high_precision(p, rng):
    for _ in range(10):
        r = rng.normal(size=12) + 1j * rng.normal(size=12)
        w = surrogate_weights(r, p)
        tau, lam = w.raw()
        t_ref, l_ref, t = tau_reference(np.abs(r), p)
        np.testing.assert_allclose(tau, t_ref, rtol=1e-9)
        np.testing.assert_allclose(lam, l_ref, rtol=1e-9, atol=1e-9 * np.max(np.abs(l_ref)))
        assert w.t == pytest.approx(t, rel=1e-12)
        assert np.all(lam <= 1e-9 * np.max(np.abs(l_ref)))


@pytest.mark.parametrize("p", [4.0, 16.0, 256.0])
def test_equal_moduli(p):
    r = 1.7 * np.exp(1j * np.arange(6))
    w = surrogate_weights(r, p)
    assert w.t == pytest.approx(6 ** (1 / p) * 1.7, rel=1e-12)
    tau, lam = w.raw()
    t_ref, l_ref, _ = tau_reference(np.abs(r), p)
    assert np.all(np.isfinite(tau))
    np.testing.assert_allclose(tau, t_ref, rtol=1e-9)
    np.testing.assert_allclose(lam, l_ref, rtol=1e-8)


@pytest.mark.parametrize("p", [4.0, 16.0, 8192.0])
def test_dominant_lag_limit(p):
    # one nonzero sidelobe: t equals its modulus and the limit value applies
    r = np.array([0.0, 2.0, 0.0, 0.0])
    w = surrogate_weights(r, p)
    log_tau = math.log(w.tau[1]) + w.log_scale
    assert log_tau == pytest.approx(math.log(p * (p - 1) / 2) + (p - 2) * math.log(2.0), rel=1e-12)
    assert np.all(np.isfinite(w.tau)) and np.all(np.isfinite(w.lam))
    if p > 1000:
        return
    # symmetric difference quotient of the numerator around t = x
    x = 2.0
    with localcontext() as c:
        c.prec = 80
        P, X, H = Decimal(p), Decimal(x), Decimal("1e-20")
        f = lambda t: (t**P - X**P - P * X ** (P - 1) * (t - X)) / (t - X) ** 2
        ref = float((f(X + H) + f(X - H)) / 2)
    assert w.raw()[0][1] == pytest.approx(ref, rel=1e-9)


def test_large_exponent_stays_finite():
    r = autocorrelation(generate("random", 64, seed=3)).r * 1e3
    w = surrogate_weights(r, 8192.0)
    assert np.all(np.isfinite(w.tau)) and np.all(np.isfinite(w.lam))
    assert w.tau.max() == 1.0
    assert np.isfinite(w.log_scale)


def test_rejects_small_exponent():
    with pytest.raises(ValueError):
        surrogate_weights(np.ones(3), 1.5)


def test_direction_identity(rng):
    phi = np.linspace(-np.pi + 0.01, np.pi - 0.01, 10_001)
    beta = np.tan(phi / 2)
    q = (1 + beta**2) ** 2
    worst = 0.0
    for _ in range(30):
        seq = generate("random", 9, seed=int(rng.integers(1 << 30)))
        ctx = build_context(seq, int(rng.integers(9)))
        s = np.exp(1j * rng.uniform(0, 2 * np.pi, size=8))
        H = direction_quartics(ctx, s)
        assert np.all(H[:, 1] == H[:, 3])
        ratio = np.array([np.polyval(h, beta) for h in H]).T / q[:, None]
        u = np.exp(1j * phi)[:, None]
        rho = ctx.a * u + ctx.b * np.conj(u) + ctx.c
        worst = max(worst, np.max(np.abs(ratio - (np.conj(rho) * s).real)))
    assert worst < 1e-9


def surrogate_grid_min(x, d, w, npts=10**6):
    """Minimum of sum tau|r_k|^2 + lam Re(r_k conj(dir_k)) over a phase grid."""
    best = np.inf
    phis = np.linspace(0, 2 * np.pi, npts, endpoint=False)
    n = len(x)
    for s in range(0, npts, 100_000):
        X = np.repeat(np.asarray(x)[None, :], 100_000, axis=0)
        X[:, d] = np.exp(1j * phis[s:s + 100_000])
        val = 0.0
        for k in range(1, n):
            r = np.sum(np.conj(X[:, : n - k]) * X[:, k:], axis=1)
            # the direction is stored in the conjugate orientation
            val = val + w.tau[k - 1] * np.abs(r) ** 2 + w.lam[k - 1] * (r * w.direction[k - 1]).real
        best = min(best, val.min())
    return best


@pytest.mark.parametrize("p", [2.0, 4.0, 32.0])
def test_continuous_step_matches_grid(p):
    seq = generate("random", 10, seed=int(p))
    for d in (0, 4, 9):
        w = surrogate_weights(autocorrelation(seq).r, p)
        out = lp_entry_continuous(seq, d, w)
        ref = surrogate_grid_min(seq.x, d, w)
        assert out.value <= ref + 1e-9 * max(1.0, abs(ref))
        assert ref - out.value <= 1e-6 * max(1.0, abs(ref))
        assert out.value <= out.previous


def test_continuous_step_quadratic_weights():
    seq = generate("random", 14, seed=2)
    k = 13
    w = SurrogateWeights(np.ones(k), np.zeros(k), 0.0, 2.0, 0.0, np.zeros(k, complex))
    out = lp_entry_continuous(seq, 5, w)
    x = np.array(seq.x)
    x[5] = np.exp(1j * out.phase)
    assert out.value == pytest.approx(np.sum(np.abs(acf_loop(x)) ** 2), rel=1e-9)
    ref = cpm_entry_optimize(seq, 5, 0.0, eps1=1e-9)
    assert out.value <= ref.value + 1e-9


@pytest.mark.parametrize("m", [2, 4, 8])
@pytest.mark.parametrize("p", [2.0, 4.0, 64.0])
def test_discrete_step_matches_brute_force(m, p):
    rng = np.random.default_rng(m + int(p))
    alphabet = Alphabet.binary() if m == 2 else Alphabet.discrete(m)
    for _ in range(20):
        n = int(rng.integers(2, 25))
        seq = generate("random", n, alphabet, seed=int(rng.integers(1 << 30)))
        d = int(rng.integers(n))
        w = surrogate_weights(autocorrelation(seq).r, p)
        scores = []
        for i in range(m):
            x = np.array(seq.x)
            x[d] = 1.0 - 2.0 * i if m == 2 else np.exp(2j * np.pi * i / m)
            a = np.abs(acf_loop(x))
            scores.append(float(np.sum(w.tau * a**2 + w.lam * a)))
        out = lp_entry_discrete(seq, d, w)
        assert out.index == pick_oracle(scores, int(seq.indices[d]))
        assert out.value == pytest.approx(scores[out.index], rel=1e-9, abs=1e-9)


def test_discrete_quadratic_weights_match_isl_step():
    seq = generate("random", 30, Alphabet.discrete(16), seed=5)
    w = surrogate_weights(autocorrelation(seq).r, 2.0)
    for d in range(30):
        assert lp_entry_discrete(seq, d, w).index == dpm_entry_optimize(seq, d, 0.0).index


def test_alphabet_checks():
    with pytest.raises(AlphabetMismatchError):
        lp_entry_continuous(generate("random", 5, Alphabet.discrete(4), seed=0), 0, p=4)
    with pytest.raises(AlphabetMismatchError):
        lp_entry_discrete(generate("random", 5, seed=0), 0, p=4)


def lp_p(state, p):
    return float(np.sum(np.abs(state.r) ** p))


@pytest.mark.parametrize("alphabet", [Alphabet.continuous(), Alphabet.discrete(8), Alphabet.binary()])
@pytest.mark.parametrize("p", [2.0, 4.0, 16.0])
def test_descent_is_monotone(alphabet, p):
    state = CodeState(generate("random", 32, alphabet, seed=7))
    vals = [lp_p(state, p)]
    for _ in range(8):
        lp_sweep(state, p)
        vals.append(lp_p(state, p))
    for a, b in zip(vals, vals[1:]):
        assert b <= a * (1 + 1e-9)
    # the majorizer is loose for large moves, so coarse alphabets may stall above p = 2
    if alphabet.is_continuous or p == 2.0:
        assert vals[-1] < vals[0]


def test_quadratic_stage_is_isl_descent_discrete():
    seq = generate("random", 40, Alphabet.discrete(8), seed=9)
    a, b = CodeState(seq), CodeState(seq)
    for _ in range(5):
        lp_sweep(a, 2.0)
        cd_sweep(b, 0.0)
        np.testing.assert_array_equal(a.values, b.values)


def test_quadratic_stage_is_isl_descent_continuous():
    seq = generate("random", 24, seed=9)
    a, b = CodeState(seq), CodeState(seq)
    for _ in range(3):
        lp_sweep(a, 2.0)
        cd_sweep(b, 0.0, eps1=1e-10)
        assert a.objective(0.0) == pytest.approx(b.objective(0.0), rel=1e-6)
        np.testing.assert_allclose(np.angle(a.x * np.conj(b.x)), 0.0, atol=1e-3)


def test_schedule_validation():
    seq = generate("random", 6, seed=0)
    for bad in ([], [4.0, 8.0], [2.0, 2.0], [2.0, 8.0, 4.0]):
        with pytest.raises(ValueError):
            lp_schedule_run(seq, bad)


def test_default_schedule():
    assert DEFAULT_SCHEDULE == tuple(2.0**j for j in range(1, 14))
    hist = []
    out = lp_schedule_run(generate("binary-random", 12, Alphabet.binary(), seed=1), history=hist)
    assert [h.p for h in hist] == list(DEFAULT_SCHEDULE)
    assert all(isinstance(h, LpStage) and 1 <= h.sweeps <= 100 for h in hist)
    assert out.alphabet.is_binary


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 20), st.sampled_from([2.0, 8.0, 128.0]), st.integers(0, 2**31))
def test_stage_norm_non_increasing(n, p, seed):
    hist = []
    lp_schedule_run(generate("random", n, Alphabet.discrete(4), seed=seed), [2.0, p] if p > 2 else [2.0], history=hist)
    for stage in hist:
        for a, b in zip(stage.norms, stage.norms[1:]):
            assert b <= a * (1 + 1e-9)


def test_schedule_improves_peak():
    seq = generate("random", 48, Alphabet.discrete(16), seed=2)
    out = lp_schedule_run(seq)
    assert psl(out) < psl(seq)
    assert isl(out) < isl(seq)


def test_initialized_descent_beats_raw_start():
    alphabet = Alphabet.discrete(16)
    wins = 0
    for seed in range(50):
        raw = generate("random", 64, alphabet, seed=seed)
        cfg = DesignConfig(theta=1.0, alphabet=alphabet, lp_init="on", starts=(("random", seed),))
        wins += multi_start(cfg, 64).final_psl <= psl(raw)
    assert wins >= 45
