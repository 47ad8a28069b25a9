"""Command-line entry point: run, list-tests, compare, convergence."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .cli_io import ConfigError, load_config, read_snapshot, record_primitives, run_to_directory
from .diagnostics import GridMismatchError, error_norms
from .driver import SimulationError, run
from .model import RecoveryError
from .problems import PROBLEMS

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    result = run_to_directory(cfg, args.out)
    print(f"{cfg.test}: {result.steps} steps to t={result.final.t!r}; output in {args.out or cfg.out}")
    return EXIT_OK


def _cmd_list(args) -> int:
    for name, p in PROBLEMS.items():
        print(f"{name:30s} {p.dim}D {p.regime:12s} {p.description}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = record_primitives(read_snapshot(args.a))
    b = record_primitives(read_snapshot(args.b))
    if a.shape[1:] > b.shape[1:]:
        a, b = b, a
    l1, linf = error_norms(a, b)
    for name, x, y in zip(("rho", "u", "v"), l1, linf):
        print(f"{name}: L1={x:.6e} Linf={y:.6e}")
    return EXIT_OK


def convergence_table(cfg, grids, reference: int):
    """L1/Linf errors of rho on each grid against a fine reference run of the same config."""
    if cfg.problem.dim != 1:
        raise ConfigError("convergence studies are 1D only")
    ref = run(cfg.replace(N=reference, snapshots=()).to_runspec()).final_q
    rows = []
    for n in grids:
        q = run(cfg.replace(N=n, snapshots=()).to_runspec()).final_q
        l1, linf = error_norms(q, ref)
        rows.append((n, float(l1[0]), float(linf[0])))
    return rows


def _cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    grids = [int(g) for g in args.grids.split(",")]
    rows = convergence_table(cfg, grids, args.reference)
    print(f"{'N':>6} {'L1(rho)':>14} {'Linf(rho)':>14} {'order':>7}")
    prev = None
    for n, l1, linf in rows:
        order = "" if prev is None else f"{np.log(prev[1] / l1) / np.log(n / prev[0]):7.3f}"
        print(f"{n:6d} {l1:14.6e} {linf:14.6e} {order:>7}")
        prev = (n, l1)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flrwflow", description="Finite volume solver for isothermal flows on FLRW-type backgrounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a config file and write snapshots")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides the config's out key)")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("list-tests", help="list the built-in experiments")
    p.set_defaults(func=_cmd_list)
    p = sub.add_parser("compare", help="print L1/Linf differences between two snapshots")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_compare)
    p = sub.add_parser("convergence", help="grid convergence against a fine reference run")
    p.add_argument("config")
    p.add_argument("--grids", default="50,100,200,400")
    p.add_argument("--reference", type=int, default=5000)
    p.set_defaults(func=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, RecoveryError, GridMismatchError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
