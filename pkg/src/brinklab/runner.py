"""Execute configured runs and read/write run directories and CSV tables."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import replace
from pathlib import Path

from .brinkman import BrinkmanRunConfig, run
from .darcy import DarcyRunConfig, darcy_run
from .diagnostics import CSV_COLUMNS
from .experiments import EPS_COLUMNS, NU_COLUMNS, SweepResult, nu_distances
from .grid import read_field, snapshot_path, write_field
from .state import RunResult

log = logging.getLogger(__name__)


def execute(cfg):
    """Run a Brinkman or Darcy config; frozen-coefficient runs build their own reference."""
    if isinstance(cfg, DarcyRunConfig):
        return darcy_run(cfg)
    if cfg.extra.get("requested_mode") == "frozen_coefficient":
        ref = run(replace(cfg, epsilon=0.0, record_steps=True, name=f"{cfg.name}-ref"))
        return run(replace(cfg, mode="frozen_coefficient", reference=ref))
    return run(cfg)


def write_diagnostics_csv(result: RunResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for rec in result.records:
            w.writerow([repr(float(v)) for v in rec.as_row()])
    return path


def read_csv_columns(path) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def save_run(result: RunResult, run_dir, snapshots: bool = True) -> Path:
    """Write diagnostics.csv, meta.json and per-output field snapshots."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    write_diagnostics_csv(result, run_dir / "diagnostics.csv")
    meta = {
        "model": result.model,
        "grid": {"dim": result.grid.dim, "L": result.grid.L, "N": result.grid.N},
        "params": result.params,
        "times": [float(t) for t in result.times],
        "n_steps": result.n_steps,
        "max_elliptic_residual": result.max_elliptic_residual,
        "max_ceiling_ratio": result.max_ceiling_ratio,
        "growth": [g.label for g in result.growth],
    }
    (run_dir / "meta.json").write_text(json.dumps(meta, indent=2))
    if snapshots:
        for k, (s, W) in enumerate(zip(result.states, result.potentials)):
            write_field(snapshot_path(run_dir, "n1", k), s.n1, s.t, "n1")
            write_field(snapshot_path(run_dir, "n2", k), s.n2, s.t, "n2")
            write_field(snapshot_path(run_dir, "W", k), W, s.t, "W")
    return run_dir


def load_snapshots(run_dir):
    """Return (meta, times, totals, potentials) from a saved run directory."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "meta.json").read_text())
    times, totals, pots = [], [], []
    for k in range(len(meta["times"])):
        n1, t, _ = read_field(snapshot_path(run_dir, "n1", k))
        n2, _, _ = read_field(snapshot_path(run_dir, "n2", k))
        W, _, _ = read_field(snapshot_path(run_dir, "W", k))
        times.append(t)
        totals.append(n1 + n2)
        pots.append(W)
    return meta, times, totals, pots


def compare_runs(ref_dir, runs_dir) -> list[dict]:
    """Distances of every Brinkman run under ``runs_dir`` to a saved Darcy run."""
    _, ref_times, ref_totals, _ = load_snapshots(ref_dir)
    rows = []
    for d in sorted(Path(runs_dir).iterdir()):
        if not (d / "meta.json").exists() or d.resolve() == Path(ref_dir).resolve():
            continue
        meta, times, totals, pots = load_snapshots(d)
        if meta["model"] != "brinkman":
            continue
        if len(times) != len(ref_times) or max(abs(a - b) for a, b in zip(times, ref_times)) > 1e-12:
            log.warning("skipping %s: output times do not match the reference", d)
            continue
        row = {"run": d.name, "param": meta["params"]["nu"]}
        row.update(nu_distances(times, totals, pots, ref_totals))
        rows.append(row)
    rows.sort(key=lambda r: -r["param"])
    return rows


def write_sweep_csv(sweep: SweepResult, path) -> Path:
    cols = NU_COLUMNS if sweep.param == "nu" else EPS_COLUMNS
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("param",) + cols)
        for i, v in enumerate(sweep.values):
            w.writerow([repr(v)] + [repr(float(sweep.distances[c][i])) for c in cols])
    return path


def write_rows_csv(rows: list[dict], path, columns) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([r[c] for c in columns])
    return path


def sweep_report(sweep: SweepResult) -> str:
    lines = [f"sweep over {sweep.param}: {', '.join(f'{v:g}' for v in sweep.values)}", "", "fitted log-log slopes:"]
    for name, (slope, resid) in sweep.slopes.items():
        lines.append(f"  {name:14s} slope {slope:+.4f}  rms residual {resid:.3e}")
    if sweep.bounds:
        lines += ["", "uniform bounds (per run):"]
        for name, vals in sweep.bounds.items():
            ratio = max(vals) / min(vals) if min(vals) > 0 else float("inf")
            lines.append(f"  {name:16s} " + " ".join(f"{v:.4e}" for v in vals) + f"   max/min {ratio:.3f}")
    return "\n".join(lines) + "\n"
