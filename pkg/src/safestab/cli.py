"""Command-line front end: ``safestab {eval,simulate,sweep,find-x0}``.

Exit codes: 0 ok, 2 usage or config error, 3 evaluation or integration
error, 4 safety violation, 5 search failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

import numpy as np

from .blend import BlendConfig
from .config import ConfigError, RunConfig, flagship_path, load_config, load_system, parse_vector
from .csvio import sweep_csv, trajectory_csv
from .errors import SafeStabError
from .feasibility import SetKind, feasible_set
from .plant import lie_data
from .priority import mode
from .search import find_x0
from .simulate import ControllerSpec, Law, simulate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EVAL = 3
EXIT_UNSAFE = 4
EXIT_SEARCH = 5


class _Usage(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _emit(record: dict, out=None):
    out = out or sys.stdout
    for k, v in record.items():
        print(f"{k}={_fmt(v)}", file=out)


def _add_controller_flags(p: argparse.ArgumentParser):
    p.add_argument("--law", choices=[law.value for law in Law])
    p.add_argument("--formula", choices=["sontag", "freeman"])
    p.add_argument("--lambda", dest="lambda_kind", choices=["logistic", "tanh", "algebraic"])
    p.add_argument("--eta", type=float)
    p.add_argument("--c", type=float)


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("config", nargs="?", help="INI config (default: shipped flagship scenario)")
    p.add_argument("--system", help="builtin name or package.module:function")
    p.add_argument("--x", help="initial state, comma separated")
    _add_controller_flags(p)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--out", help="output CSV path ('-' for standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="safestab", description="Optimization-free safe stabilizing feedback.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="Lie data, feasible set and every law at one state")
    p.add_argument("--system", default="planar_example")
    p.add_argument("--x", required=True, help="state, comma separated")
    _add_controller_flags(p)

    _add_run_flags(sub.add_parser("simulate", help="closed-loop run to CSV"))
    _add_run_flags(sub.add_parser("sweep", help="compatibility map over a state grid"))
    _add_run_flags(sub.add_parser("find-x0", help="search the grid for the flagship initial state"))
    return parser


def _controller(args, base: ControllerSpec) -> ControllerSpec:
    blend = base.blend
    try:
        blend = BlendConfig(
            formula=args.formula or blend.formula,
            lambda_kind=args.lambda_kind or blend.lambda_kind,
            eta=args.eta if args.eta is not None else blend.eta,
        )
        return ControllerSpec(args.law or base.law, blend, args.c if args.c is not None else base.c)
    except ValueError as exc:
        raise _Usage(str(exc)) from exc


def _checked(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except ValueError as exc:
        raise _Usage(str(exc)) from exc


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config if args.config else flagship_path())
    ctrl = _controller(args, cfg.controller)
    cfg = replace(cfg, controller=ctrl)
    if args.system:
        cfg = replace(cfg, system_name=args.system, system_params=())
    if args.x:
        cfg = replace(cfg, x0=parse_vector(args.x))
    if args.dt is not None or args.t_end is not None:
        opts = _checked(replace, cfg.options, dt=args.dt if args.dt is not None else cfg.options.dt,
                        t_end=args.t_end if args.t_end is not None else cfg.options.t_end)
        cfg = replace(cfg, options=opts)
    if args.out:
        cfg = replace(cfg, output=args.out, sweep_output=args.out)
    return cfg


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_eval(args) -> int:
    bundle = load_system(args.system)
    x = np.array(parse_vector(args.x))
    d = lie_data(bundle, x)
    fs = feasible_set(d)
    base = _controller(args, ControllerSpec())
    record = {
        "system": args.system,
        "x": ",".join(_fmt(float(v)) for v in x),
        "a0": d.a0, "b0": d.b0, "a1": d.a1, "b1": d.b1,
        "feasible_kind": fs.kind.value,
        "feasible_lo": fs.lower if not fs.empty else math.nan,
        "feasible_hi": fs.upper if not fs.empty else math.nan,
        "compatible": int(mode(d)),
        "mode": int(mode(d)),
    }
    for law in Law:
        try:
            record[f"u_{law.value}"] = float(replace(base, law=law)(d, x))
        except SafeStabError as exc:
            record[f"u_{law.value}"] = f"undefined ({type(exc).__name__})"
    if args.law:
        record["law"] = args.law
        record["u"] = record[f"u_{args.law}"]
    _emit(record)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    bundle = cfg.bundle()
    traj, rep = simulate(bundle, cfg.controller, cfg.x0, options=cfg.options, engine=cfg.engine)
    _write(cfg.output, trajectory_csv(traj))
    summary = {"system": bundle.label or cfg.system_name, "law": cfg.controller.law.value,
               "x0": ",".join(_fmt(v) for v in cfg.x0), "rows": len(traj), "output": cfg.output}
    summary.update(rep.summary())
    _emit(summary, sys.stderr if cfg.output == "-" else sys.stdout)
    return EXIT_UNSAFE if rep.safety_violated else EXIT_OK


def _sweep_points(cfg: RunConfig):
    sw = cfg.sweep
    if sw.mode == "random":
        rng = np.random.default_rng(cfg.seed)
        pts = np.column_stack([rng.uniform(sw.x1_min, sw.x1_max, sw.samples),
                               rng.uniform(sw.x2_min, sw.x2_max, sw.samples)])
        return [tuple(map(float, p)) for p in pts]
    return [(float(a), float(b)) for a in np.linspace(sw.x1_min, sw.x1_max, sw.n1)
            for b in np.linspace(sw.x2_min, sw.x2_max, sw.n2)]


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    bundle = cfg.bundle()
    if bundle.n != 2:
        raise _Usage(f"sweep needs a planar system, got dimension {bundle.n}")
    rows = []
    for x1, x2 in _sweep_points(cfg):
        d = lie_data(bundle, (x1, x2))
        fs = feasible_set(d)
        m = int(mode(d))
        lo, hi = (math.nan, math.nan) if fs.kind is SetKind.EMPTY else (fs.lower, fs.upper)
        rows.append((x1, x2, m, m, d.b0, d.b1, lo, hi, fs.kind.value))
    _write(cfg.sweep_output, sweep_csv(rows))
    _emit({"rows": len(rows), "incompatible": sum(1 for r in rows if r[2] == 0), "output": cfg.sweep_output},
          sys.stderr if cfg.sweep_output == "-" else sys.stdout)
    return EXIT_OK


def cmd_find_x0(args) -> int:
    cfg = _run_config(args)
    res = find_x0(cfg.bundle(), cfg.search, cfg.controller, dt=cfg.options.dt, t_end=cfg.options.t_end)
    record = {"found": int(res.found), "visited": res.visited, "simulated": res.simulated}
    if res.found:
        record.update({
            "x0": ",".join(_fmt(v) for v in res.x0),
            "baseline_law": Law.CLF_ONLY_SONTAG.value,
            "baseline_min_h": res.baseline_min_h,
            "law": cfg.controller.law.value,
            "min_h": res.min_h,
            "mode_pattern": "->".join(str(m) for m in res.pattern),
            "mode_transitions": ";".join(f"{t:.17g}:{int(m)}" for t, m in res.transitions),
        })
    _emit(record)
    return EXIT_OK if res.found else EXIT_SEARCH


_COMMANDS = {"eval": cmd_eval, "simulate": cmd_simulate, "sweep": cmd_sweep, "find-x0": cmd_find_x0}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, _Usage) as exc:
        parser.print_usage(sys.stderr)
        print(f"safestab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SafeStabError as exc:
        print(f"safestab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except OSError as exc:
        print(f"safestab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
