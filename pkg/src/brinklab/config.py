"""
Run configuration files.

The format is TOML with sections ``grid``, ``brinkman``, ``growth.1``,
``growth.2``, ``init.1``, ``init.2`` and ``output``, plus top-level
``model`` ("brinkman" or "darcy"), ``T_final`` and ``run_id``. A species may
list several bumps with ``[[init.1]]`` array-of-tables syntax; they are summed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import tomli

from .brinkman import MODES, BrinkmanRunConfig
from .darcy import BarenblattInit, DarcyRunConfig
from .grid import Grid
from .growth import GrowthLaw, make_linear_logistic, zero_growth
from .initial import FromFile, Gaussian, Indicator, Zero


class ConfigError(ValueError):
    pass


@dataclass
class OutputOptions:
    directory: Path
    run_id: str
    snapshots: bool = True
    figures: bool = True
    figure_format: str = "png"

    @property
    def run_dir(self) -> Path:
        return self.directory / self.run_id


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    raw.setdefault("_source", str(path))
    return raw


def _section(raw, name, required=True):
    sec = raw.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section [{name}]")
        return {}
    return sec


def parse_growth(sec: dict) -> GrowthLaw:
    kind = sec.get("kind", "linear")
    if kind == "linear":
        try:
            return make_linear_logistic(float(sec["alpha"]), float(sec["n_bar"]))
        except KeyError as e:
            raise ConfigError(f"linear growth law needs key {e}") from None
    if kind == "zero":
        return zero_growth(float(sec.get("n_bar", 1.0)))
    raise ConfigError(f"unknown growth kind {kind!r}")


def _center(v):
    return tuple(v) if isinstance(v, list) else float(v)


def parse_init(sec, base_dir: Path | None = None):
    if isinstance(sec, list):
        return [parse_init(s, base_dir) for s in sec]
    kind = sec.get("kind", "gaussian")
    if kind == "gaussian":
        return Gaussian(_center(sec.get("center", 0.0)), float(sec.get("width", 1.0)), float(sec.get("mass", 1.0)))
    if kind == "indicator":
        return Indicator(_center(sec.get("center", 0.0)), float(sec.get("half_width", 1.0)),
                         float(sec.get("height", 1.0)))
    if kind == "barenblatt":
        return BarenblattInit(float(sec.get("t0", 1.0)), float(sec.get("mass", 1.0)))
    if kind == "file":
        p = Path(sec["path"])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return FromFile(str(p))
    if kind == "zero":
        return Zero()
    raise ConfigError(f"unknown init kind {kind!r}")


def build_configs(raw: dict):
    """Return (run config, output options) from a parsed file."""
    model = raw.get("model", "brinkman")
    base_dir = Path(raw["_source"]).parent if "_source" in raw else None
    g = _section(raw, "grid")
    grid = Grid(int(g.get("dim", 1)), float(g.get("L", 20.0)), int(g.get("N", 1024)))
    growth_sec = _section(raw, "growth")
    init_sec = _section(raw, "init")
    try:
        growth = (parse_growth(growth_sec["1"]), parse_growth(growth_sec["2"]))
        init = (parse_init(init_sec["1"], base_dir), parse_init(init_sec["2"], base_dir))
    except KeyError as e:
        raise ConfigError(f"missing species section {e}") from None
    out = _section(raw, "output", required=False)
    T = float(raw.get("T_final", out.get("T_final", 1.0)))
    out_dt = float(out["dt"]) if "dt" in out else None
    run_id = str(raw.get("run_id", out.get("run_id", model)))
    b = _section(raw, "brinkman", required=(model == "brinkman"))
    cfl = float(b.get("cfl_safety", 0.45))
    if model == "brinkman":
        mode = str(b.get("mode", "self_consistent"))
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}")
        # frozen runs need a reference trajectory; the driver builds it (see runner.execute)
        cfg = BrinkmanRunConfig(grid, float(b["nu"]), growth, init, T, epsilon=float(b.get("epsilon", 0.0)),
                                cfl_safety=cfl, output_dt=out_dt, name=run_id)
        cfg.extra["requested_mode"] = mode
    elif model == "darcy":
        cfg = DarcyRunConfig(grid, growth, init, T, cfl_safety=cfl, output_dt=out_dt,
                             t0=float(raw.get("t0", 0.0)), name=run_id)
    else:
        raise ConfigError(f"unknown model {model!r}")
    opts = OutputOptions(Path(out.get("dir", "runs")), run_id, bool(out.get("snapshots", True)),
                         bool(out.get("figures", True)), str(out.get("figure_format", "png")))
    return cfg, opts
