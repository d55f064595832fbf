"""Outer coordinate-descent loop, multi-start harness and Pareto sweep."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .context import CodeState, EntryResult
from .continuous import cpm_entry_optimize
from .core import (
    Alphabet,
    PhaseSequence,
    check_theta,
    generate,
    isl,
    objective_f_theta,
    psl,
)
from .discrete import dpm_entry_optimize
from .errors import AlphabetMismatchError
from .lpinit import DEFAULT_SCHEDULE, lp_schedule_run

WORKERS_ENV = "PHASECODE_WORKERS"
RULES = ("cyclic", "mbi-refine")


@dataclass(frozen=True)
class DesignConfig:
    """Settings of a design run.

    Parameters
    ----------
    theta : float
        Pareto weight: 1 minimizes PSL^2, 0 minimizes ISL.
    alphabet : Alphabet
    eps : float
        Stop once a full sweep improves the objective by less than this.
    eps1 : float
        Bisection accuracy of the continuous entry solver.
    rule : {"cyclic", "mbi-refine"}
        ``mbi-refine`` follows the cyclic run with best-single-entry steps.
    max_outer_sweeps : int
    starts : tuple of (kind, seed)
        Generator kind (``frank``, ``golomb``, ``random``, ``binary-random``)
        and seed, one per start.
    lp_init : "auto", "on", "off" or a tuple of exponents
        ``auto`` runs the default schedule when ``theta > 0``.
    lp_inner_eps, lp_max_sweeps
        Stage stopping rule of the l_p initialization.
    max_mbi_steps : int, optional
        Cap on refinement steps, ``10 * N`` when omitted.
    workers : int, optional
        Processes for multi-start; ``$PHASECODE_WORKERS`` or 1 when omitted.
    """

    theta: float = 1.0
    alphabet: Alphabet = field(default_factory=Alphabet.continuous)
    eps: float = 1e-5
    eps1: float = 1e-6
    rule: str = "cyclic"
    max_outer_sweeps: int = 1000
    starts: tuple = (("random", 0),)
    lp_init: object = "auto"
    lp_inner_eps: float = 1e-5
    lp_max_sweeps: int = 100
    max_mbi_steps: int | None = None
    workers: int | None = None

    def __post_init__(self):
        check_theta(self.theta)
        if not self.eps > 0 or not self.eps1 > 0:
            raise ValueError("eps and eps1 must be positive")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if not self.starts:
            raise ValueError("at least one start is required")
        if self.max_outer_sweeps < 1:
            raise ValueError("max_outer_sweeps must be >= 1")

    def schedule(self):
        """The l_p schedule to run before descent, or None."""
        lp = self.lp_init
        if lp is None or lp == "off" or lp is False:
            return None
        if lp == "auto":
            return DEFAULT_SCHEDULE if self.theta > 0 else None
        if lp == "on" or lp is True:
            return DEFAULT_SCHEDULE
        return tuple(float(p) for p in lp)


@dataclass
class StartReport:
    kind: str
    seed: int | None
    trace: list
    objective: float
    sweeps: int
    steps: int
    sequence: PhaseSequence
    wall_time: float
    lp_init: bool = False


@dataclass
class DesignReport:
    """Best code over all starts plus per-start traces.

    ``objective_trace[i]`` is the list of ``(sweep, f_theta)`` of start i;
    sweep 0 is the starting code (after the optional l_p initialization).
    """

    best_sequence: PhaseSequence
    objective: float
    objective_trace: list
    final_psl: float
    final_isl: float
    iterations: int
    wall_time: float
    theta: float
    best_start: int = 0
    starts: list = field(default_factory=list)

    @property
    def seeds(self):
        return [s.seed for s in self.starts]


def entry_solver(alphabet: Alphabet):
    if alphabet.is_continuous:
        return lambda state, d, theta, eps1: cpm_entry_optimize(state, d, theta, eps1)
    return lambda state, d, theta, eps1: dpm_entry_optimize(state, d, theta)


def _apply(state: CodeState, res: EntryResult) -> bool:
    if res.value < res.previous and res.entry != state.values[res.d]:
        state.set_entry(res.d, res.entry)
        return True
    return False


def cd_sweep(state: CodeState, theta: float, eps1: float = 1e-6) -> int:
    """One cyclic pass over all entries; returns the number of accepted moves."""
    solve = entry_solver(state.alphabet)
    moved = 0
    for d in range(state.n):
        moved += _apply(state, solve(state, d, theta, eps1))
    state.refresh()
    return moved


def mbi_step(seq, theta: float, eps1: float = 1e-6):
    """Apply only the single entry change with the largest improvement.

    Parameters
    ----------
    seq : PhaseSequence or CodeState
        A ``CodeState`` is updated in place.

    Returns
    -------
    (d_best, seq_next)
        ``d_best`` is None, and the code unchanged, when no entry improves.
        Ties go to the smallest index.
    """
    state = seq if isinstance(seq, CodeState) else CodeState(seq)
    solve = entry_solver(state.alphabet)
    results = [solve(state, d, theta, eps1) for d in range(state.n)]
    gains = np.array([r.improvement for r in results])
    d = int(np.argmax(gains))
    if gains[d] > 0 and _apply(state, results[d]):
        state.refresh()
    else:
        d = None
    return d, (state if isinstance(seq, CodeState) else state.sequence())


def cd_run(config: DesignConfig, seq0: PhaseSequence, kind: str = "given", seed=None) -> DesignReport:
    """Cyclic coordinate descent from ``seq0``.

    Stops when a full sweep improves ``f_theta`` by less than ``config.eps``
    or after ``config.max_outer_sweeps`` sweeps, then optionally refines with
    :func:`mbi_step` until no entry improves.
    """
    if seq0.alphabet != config.alphabet:
        raise AlphabetMismatchError(
            f"alphabet-mismatch: start is {seq0.alphabet}, configuration is {config.alphabet}"
        )
    t0 = time.perf_counter()
    theta = config.theta
    state = CodeState(seq0)
    f = state.objective(theta)
    trace = [(0, f)]
    sweeps = 0
    while sweeps < config.max_outer_sweeps:
        cd_sweep(state, theta, config.eps1)
        sweeps += 1
        f_new = state.objective(theta)
        trace.append((sweeps, f_new))
        done = f - f_new < config.eps
        f = f_new
        if done:
            break
    steps = 0
    if config.rule == "mbi-refine":
        cap = config.max_mbi_steps or 10 * state.n
        while steps < cap:
            d, _ = mbi_step(state, theta, config.eps1)
            if d is None:
                break
            steps += 1
        if steps:
            trace.append((sweeps + 1, state.objective(theta)))
    seq = state.sequence()
    start = StartReport(kind, seed, trace, trace[-1][1], sweeps, steps, seq, time.perf_counter() - t0)
    return _report([start], theta, time.perf_counter() - t0)


def _report(starts, theta, wall):
    best = min(range(len(starts)), key=lambda i: (starts[i].objective, i))
    seq = starts[best].sequence
    return DesignReport(
        best_sequence=seq,
        objective=objective_f_theta(seq, theta),
        objective_trace=[s.trace for s in starts],
        final_psl=psl(seq),
        final_isl=isl(seq),
        iterations=sum(s.sweeps for s in starts),
        wall_time=wall,
        theta=theta,
        best_start=best,
        starts=list(starts),
    )


def start_sequence(kind: str, n: int, alphabet: Alphabet, seed=None) -> PhaseSequence:
    """Starting code of one run; random binary starts need a binary alphabet."""
    if kind == "binary-random" and not alphabet.is_binary:
        raise AlphabetMismatchError("alphabet-mismatch: binary-random start needs a binary alphabet")
    return generate(kind, n, alphabet, seed)


def run_start(config: DesignConfig, n: int, kind: str, seed=None) -> StartReport:
    t0 = time.perf_counter()
    seq = start_sequence(kind, n, config.alphabet, seed)
    sched = config.schedule()
    if sched:
        seq = lp_schedule_run(seq, sched, config.lp_inner_eps, config.lp_max_sweeps)
    start = cd_run(config, seq, kind, seed).starts[0]
    start.lp_init = bool(sched)
    start.wall_time = time.perf_counter() - t0
    return start


def _run_start_args(args):
    return run_start(*args)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def multi_start(config: DesignConfig, n: int) -> DesignReport:
    """Run every configured start and keep the best (first on ties).

    Starts are independent and may run in separate processes; results are
    merged in start order, so the outcome does not depend on the worker
    count.
    """
    t0 = time.perf_counter()
    jobs = [(config, n, kind, seed) for kind, seed in config.starts]
    workers = config.workers or default_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            starts = list(pool.map(_run_start_args, jobs))
    else:
        starts = [run_start(*job) for job in jobs]
    return _report(starts, config.theta, time.perf_counter() - t0)


@dataclass
class ParetoPoint:
    theta: float
    psl: float
    isl: float
    objective: float
    sequence: PhaseSequence
    report: DesignReport = field(repr=False, default=None)


DEFAULT_THETAS = (1.0, 0.8, 0.6, 0.4, 0.2, 0.0)


def pareto_sweep(config: DesignConfig, n: int, thetas=DEFAULT_THETAS) -> list[ParetoPoint]:
    """Warm-started chain over decreasing Pareto weights.

    The first weight runs the full multi-start (with the configured l_p
    initialization); every later weight starts from the previous optimum.
    """
    thetas = [check_theta(t) for t in thetas]
    if not thetas or any(b >= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("thetas must be strictly decreasing")
    out = []
    rep = multi_start(replace(config, theta=thetas[0]), n)
    out.append(ParetoPoint(thetas[0], rep.final_psl, rep.final_isl, rep.objective, rep.best_sequence, rep))
    for th in thetas[1:]:
        rep = cd_run(replace(config, theta=th), out[-1].sequence, "warm", None)
        out.append(ParetoPoint(th, rep.final_psl, rep.final_isl, rep.objective, rep.best_sequence, rep))
    return out
