"""Command-line front end: design, evaluate, pareto and bench.

Reported dB values are normalized by the mainlobe r0 = N:

    psl_db = 20*log10(PSL/N),   isl_db = 10*log10(ISL/N^2)

Exit codes: 0 success, 2 usage error, 3 input-format error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .core import Alphabet, isl, load_sequence, psl, save_sequence, write_acf_csv
from .driver import DEFAULT_THETAS, WORKERS_ENV, DesignConfig, multi_start, pareto_sweep
from .errors import PhaseCodeError, SchemaError, SequenceError, ZeroPolynomialError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4

DB_NOTE = "dB values: psl_db = 20*log10(PSL/N), isl_db = 10*log10(ISL/N^2)."


class UsageError(Exception):
    pass


def _version():
    from . import __version__

    return __version__


def psl_db(value, n):
    return 20.0 * math.log10(value / n) if value > 0 else -math.inf


def isl_db(value, n):
    return 10.0 * math.log10(value / n**2) if value > 0 else -math.inf


def manifest_hash(command: str, config: dict, seeds) -> str:
    """Short digest of what produced an output (no timestamps)."""
    blob = json.dumps(
        {"command": command, "config": config, "version": _version(), "seeds": list(seeds)},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _num(v):
    return repr(float(v))


# -- flag parsing -------------------------------------------------------------


def parse_alphabet(text):
    try:
        return Alphabet.parse(text)
    except SequenceError as exc:
        raise UsageError(str(exc)) from None


def parse_starts(text: str, seed: int):
    """``frank,golomb,random:5`` -> ((kind, seed), ...); random seeds count up from ``seed``."""
    out = []
    nxt = seed
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        kind, _, count = item.partition(":")
        if kind not in ("frank", "golomb", "random", "binary-random"):
            raise UsageError(f"unknown start kind {kind!r}")
        if kind in ("frank", "golomb"):
            if count:
                raise UsageError(f"{kind} takes no count")
            out.append((kind, None))
            continue
        try:
            k = int(count) if count else 1
        except ValueError:
            raise UsageError(f"bad start count in {item!r}") from None
        if k < 1:
            raise UsageError("start counts must be >= 1")
        for _ in range(k):
            out.append((kind, nxt))
            nxt += 1
    if not out:
        raise UsageError("no starts given")
    return tuple(out)


def parse_lp_init(text: str):
    t = text.strip().lower()
    if t in ("on", "off", "auto"):
        return t
    try:
        sched = tuple(float(v) for v in t.split(","))
    except ValueError:
        raise UsageError(f"--lp-init expects on, off, auto or a list of exponents, got {text!r}") from None
    if sched[0] != 2.0 or any(b <= a for a, b in zip(sched, sched[1:])):
        raise UsageError("--lp-init schedule must start at 2 and increase strictly")
    return sched


def parse_floats(text: str, name: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name} expects a comma-separated list of numbers") from None


def _config(args, theta=None, alphabet=None, starts=None) -> DesignConfig:
    try:
        return DesignConfig(
            theta=args.theta if theta is None else theta,
            alphabet=alphabet or parse_alphabet(args.alphabet),
            eps=args.eps,
            eps1=args.eps1,
            rule=args.rule,
            max_outer_sweeps=args.max_sweeps,
            starts=starts or parse_starts(args.starts, args.seed),
            lp_init=parse_lp_init(args.lp_init),
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config_echo(cfg: DesignConfig, n: int) -> dict:
    d = asdict(cfg)
    d["alphabet"] = str(cfg.alphabet)
    d["starts"] = [list(s) for s in cfg.starts]
    d.pop("workers")
    d["n"] = n
    return d


def _metrics(seq):
    n = seq.n
    p, i = psl(seq), isl(seq)
    return {"n": n, "alphabet": str(seq.alphabet), "psl": p, "isl": i,
            "psl_db": psl_db(p, n), "isl_db": isl_db(i, n)}


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_finite(x) for x in v]
    return v


def _write_json(path, data):
    Path(path).write_text(json.dumps(_finite(data), indent=1, sort_keys=True) + "\n")


# -- commands -----------------------------------------------------------------


def cmd_design(args):
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    cfg = _config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo(cfg, args.n)
    mh = manifest_hash("design", echo, [s for _, s in cfg.starts])
    rep = multi_start(cfg, args.n)
    seq = rep.best_sequence
    save_sequence(seq, out / "sequence.json", manifest=mh)
    with open(out / "trace.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start", "kind", "seed", "sweep", "objective", "manifest"])
        for i, (st, tr) in enumerate(zip(rep.starts, rep.objective_trace)):
            for sweep, f in tr:
                w.writerow([i, st.kind, "" if st.seed is None else st.seed, sweep, _num(f), mh])
    m = _metrics(seq)
    report = {
        "command": "design",
        "manifest": mh,
        "version": _version(),
        "config": echo,
        "seeds": [s for _, s in cfg.starts],
        "best_start": rep.best_start,
        "objective": rep.objective,
        "best_psl": m["psl"],
        "best_isl": m["isl"],
        "psl_db": m["psl_db"],
        "isl_db": m["isl_db"],
        "iterations": rep.iterations,
        "per_start": [
            {"kind": s.kind, "seed": s.seed, "objective": s.objective, "sweeps": s.sweeps,
             "mbi_steps": s.steps, "lp_init": s.lp_init, "wall_time": s.wall_time}
            for s in rep.starts
        ],
        "wall_time": rep.wall_time,
        "outputs": {"sequence": "sequence.json", "trace": "trace.csv"},
    }
    _write_json(out / "report.json", report)
    print(f"best PSL {m['psl']:.6g} ({m['psl_db']:.2f} dB)  ISL {m['isl']:.6g} "
          f"({m['isl_db']:.2f} dB)  -> {out}")
    return EXIT_OK


def cmd_evaluate(args):
    try:
        seq = load_sequence(args.path)
    except SchemaError:
        raise
    except SequenceError as exc:
        raise SchemaError("phases", str(exc)) from None
    m = _metrics(seq)
    if args.json:
        print(json.dumps(m, sort_keys=True))
    else:
        print(f"n         {m['n']}")
        print(f"alphabet  {m['alphabet']}")
        print(f"psl       {m['psl']!r}")
        print(f"isl       {m['isl']!r}")
        print(f"psl_db    {m['psl_db']:.4f}")
        print(f"isl_db    {m['isl_db']:.4f}")
    if args.acf:
        write_acf_csv(seq, args.acf)
    return EXIT_OK


def cmd_pareto(args):
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    thetas = parse_floats(args.thetas, "--thetas") if args.thetas is not None else list(DEFAULT_THETAS)
    if not thetas:
        raise UsageError("--thetas is empty")
    if any(not 0 <= t <= 1 for t in thetas):
        raise UsageError("thetas must lie in [0, 1]")
    if any(b >= a for a, b in zip(thetas, thetas[1:])):
        raise UsageError("thetas must be strictly decreasing")
    cfg = _config(args, theta=thetas[0])
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo(cfg, args.n)
    echo["thetas"] = thetas
    mh = manifest_hash("pareto", echo, [s for _, s in cfg.starts])
    points = pareto_sweep(cfg, args.n, thetas)
    with open(out / "pareto.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "psl_db", "isl_db", "psl", "isl", "sequence", "manifest"])
        for i, pt in enumerate(points):
            name = f"sequence_{i}_theta{pt.theta:g}.json"
            save_sequence(pt.sequence, out / name, theta=pt.theta, manifest=mh)
            w.writerow([_num(pt.theta), _num(psl_db(pt.psl, args.n)), _num(isl_db(pt.isl, args.n)),
                        _num(pt.psl), _num(pt.isl), name, mh])
    print(f"{len(points)} Pareto points -> {out / 'pareto.csv'}")
    return EXIT_OK


def cmd_bench(args):
    ns = [int(v) for v in parse_floats(args.grid_n, "--grid-n")] if args.grid_n else []
    alphas = [parse_alphabet(a) for a in args.grid_m.split(",") if a.strip()] if args.grid_m else []
    if args.grid_n is not None and not ns or args.grid_m is not None and not alphas:
        raise UsageError("empty grid")
    if not ns and not alphas:
        raise UsageError("empty grid: give --grid-n and/or --grid-m")
    ns = ns or [args.n]
    alphas = alphas or [parse_alphabet(args.alphabet)]
    if any(n < 2 for n in ns):
        raise UsageError("grid lengths must be >= 2")
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    theta = 1.0 if args.metric == "psl" else 0.0
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for n in ns:
        for alpha in alphas:
            kind = "binary-random" if alpha.is_binary else "random"
            starts = tuple((kind, args.seed + i) for i in range(args.runs))
            cfg = _config(args, theta=theta, alphabet=alpha, starts=starts)
            echo = _config_echo(cfg, n)
            mh = manifest_hash("bench", echo, [s for _, s in starts])
            rep = multi_start(cfg, n)
            rows.append([n, str(alpha), _num(theta), args.runs, " ".join(str(s) for _, s in starts),
                         _num(rep.final_psl), _num(rep.final_isl), _num(psl_db(rep.final_psl, n)),
                         _num(isl_db(rep.final_isl, n)), mh])
    with open(out / "bench.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "alphabet", "theta", "runs", "seeds", "best_psl", "best_isl",
                    "psl_db", "isl_db", "manifest"])
        w.writerows(rows)
    print(f"{len(rows)} cells -> {out / 'bench.csv'}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_design_flags(p, bench=False):
    p.add_argument("--n", type=int, default=64, help="code length")
    p.add_argument("--alphabet", default="continuous", help="continuous | binary | m:<M>")
    if not bench:
        p.add_argument("--theta", type=float, default=1.0, help="Pareto weight in [0, 1]")
        p.add_argument("--starts", default="random:1",
                       help="comma list of frank, golomb, random[:count], binary-random[:count]")
    p.add_argument("--seed", type=int, default=0, help="first seed of the random starts")
    p.add_argument("--eps", type=float, default=1e-5, help="minimum objective improvement per sweep")
    p.add_argument("--eps1", type=float, default=1e-6, help="bisection accuracy (continuous)")
    p.add_argument("--lp-init", default="auto",
                   help="on | off | auto (on when theta > 0) | comma list of exponents")
    p.add_argument("--rule", choices=("cyclic", "mbi-refine"), default="cyclic")
    p.add_argument("--max-sweeps", type=int, default=1000, help="cap on coordinate sweeps per start")
    p.add_argument("--workers", type=int, default=None,
                   help=f"processes for independent starts (default ${WORKERS_ENV} or 1)")
    p.add_argument("--out-dir", default=".", help="directory for the output files")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="phasecode",
        description="Unimodular code design by coordinate descent. " + DB_NOTE,
        epilog="Exit codes: 0 ok, 2 usage, 3 input format, 4 numerical failure.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="optimize a code; writes sequence.json, trace.csv, report.json",
                       description=DB_NOTE)
    _add_design_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("evaluate", help="metrics of a sequence file", description=DB_NOTE)
    p.add_argument("path")
    p.add_argument("--acf", help="write the full autocorrelation table to this CSV")
    p.add_argument("--json", action="store_true", help="print metrics as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pareto", help="warm-started sweep over decreasing theta; writes pareto.csv",
                       description=DB_NOTE)
    _add_design_flags(p)
    p.add_argument("--thetas", help="strictly decreasing list, default 1,0.8,0.6,0.4,0.2,0")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("bench", help="best-of-runs over a grid of lengths and alphabets; writes bench.csv",
                       description=DB_NOTE)
    _add_design_flags(p, bench=True)
    p.add_argument("--grid-n", help="comma list of code lengths")
    p.add_argument("--grid-m", help="comma list of alphabets (continuous, binary, m:<M>)")
    p.add_argument("--metric", choices=("psl", "isl"), default="psl",
                   help="psl runs theta = 1, isl runs theta = 0")
    p.add_argument("--runs", type=int, default=5, help="random starts per cell")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"phasecode {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"phasecode {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SequenceError as exc:
        # bad generator request (e.g. Frank with non-square N) is a flag problem
        print(f"phasecode {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ZeroPolynomialError, FloatingPointError, ArithmeticError) as exc:
        print(f"phasecode {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PhaseCodeError as exc:
        print(f"phasecode {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
