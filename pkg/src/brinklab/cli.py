"""
Command-line entry point ``lab``.

    lab run --config run.toml
    lab sweep --config run.toml --param nu --values 1e-1,3e-2,1e-2,3e-3,1e-3
    lab compare --ref runs/darcy --runs runs
    lab validate
    lab plot runs/sweep/sweep.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import plotting
from .brinkman import BrinkmanRunConfig
from .config import ConfigError, build_configs, load_config
from .experiments import NU_COLUMNS, epsilon_sweep, nu_sweep
from .runner import (compare_runs, execute, read_csv_columns, save_run, sweep_report, write_rows_csv,
                     write_sweep_csv)

log = logging.getLogger("brinklab")


def _values(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _load(path):
    try:
        return build_configs(load_config(path))
    except (ConfigError, KeyError, ValueError) as e:
        raise SystemExit(f"bad config {path}: {e}")


def cmd_run(args) -> int:
    cfg, opts = _load(args.config)
    out = Path(args.out) if args.out else opts.run_dir
    result = execute(cfg)
    save_run(result, out, snapshots=opts.snapshots)
    if opts.figures:
        fmt = opts.figure_format
        plotting.plot_profiles(result, out / f"profiles.{fmt}")
        plotting.plot_diagnostics(read_csv_columns(out / "diagnostics.csv"), out / f"diagnostics.{fmt}")
    print(f"{result.model} run: {result.n_steps} steps to t={result.final.t:g}, written to {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg, opts = _load(args.config)
    if not isinstance(cfg, BrinkmanRunConfig):
        raise SystemExit("sweeps need a brinkman config")
    values = _values(args.values)
    if args.param == "nu":
        sweep = nu_sweep(cfg, values, workers=args.workers)
    else:
        sweep = epsilon_sweep(cfg, values, mode=args.mode, workers=args.workers)
    out = Path(args.out) if args.out else opts.directory / f"{opts.run_id}-sweep-{args.param}"
    write_sweep_csv(sweep, out / "sweep.csv")
    report = sweep_report(sweep)
    (out / "sweep_report.txt").write_text(report)
    if args.save_runs:
        for v, r in zip(sweep.values, sweep.runs):
            save_run(r, out / f"{args.param}_{v:g}", snapshots=opts.snapshots)
        if args.param == "nu":
            save_run(sweep.reference, out / "darcy", snapshots=opts.snapshots)
    plotting.plot_sweep(read_csv_columns(out / "sweep.csv"), out / "sweep.svg", sweep.slopes)
    print(report, end="")
    print(f"written to {out}")
    return 0


def cmd_compare(args) -> int:
    rows = compare_runs(args.ref, args.runs)
    if not rows:
        print("no comparable brinkman runs found", file=sys.stderr)
        return 1
    out = Path(args.out) if args.out else Path(args.runs) / "compare.csv"
    cols = ("run", "param") + NU_COLUMNS
    write_rows_csv(rows, out, cols)
    print(", ".join(cols))
    for r in rows:
        print(", ".join(str(r[c]) if c == "run" else f"{r[c]:.6g}" for c in cols))
    return 0


def cmd_validate(args) -> int:
    from .validation import run_all
    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_plot(args) -> int:
    src = Path(args.csv)
    out = Path(args.out) if args.out else src.with_suffix(".svg")
    plotting.plot_sweep(read_csv_columns(src), out)
    print(f"figure written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab", description="Brinkman/Darcy two-species growth simulations")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configured simulation")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="run directory (default: output.dir/run_id)")
    r.set_defaults(fn=cmd_run)

    s = sub.add_parser("sweep", help="sweep nu or epsilon from a base config")
    s.add_argument("--config", required=True)
    s.add_argument("--param", choices=("nu", "epsilon"), default="nu")
    s.add_argument("--values", required=True, help="comma separated, strictly decreasing")
    s.add_argument("--mode", choices=("frozen_coefficient", "self_consistent"), default="frozen_coefficient",
                   help="epsilon sweeps only")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--save-runs", action="store_true", help="also write every member run")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    c = sub.add_parser("compare", help="distances of saved brinkman runs to a saved darcy run")
    c.add_argument("--ref", required=True)
    c.add_argument("--runs", required=True)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_compare)

    v = sub.add_parser("validate", help="run the acceptance checks")
    v.set_defaults(fn=cmd_validate)

    pl = sub.add_parser("plot", help="log-log figure from a sweep.csv")
    pl.add_argument("csv")
    pl.add_argument("--out")
    pl.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
