"""
Viscosity and regularization sweeps, refinement studies and log-log slope fits.

All members of a sweep share grid, growth laws, initial data and output
clock, so distances are computed time-slice by time-slice and integrated with
the trapezoid rule.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import diagnostics as dg
from .brinkman import BrinkmanRunConfig, run
from .darcy import DarcyRunConfig, darcy_run
from .grid import Field, Grid, restrict
from .state import BlowUpError, RunResult, StabilityError

log = logging.getLogger(__name__)

NU_COLUMNS = ("l2_n", "l2_W", "h1_W", "gap2", "energy_diff")
EPS_COLUMNS = ("l1", "l2", "sqrt_eps_grad")


class SweepError(RuntimeError):
    pass


def fit_slope(xs, ys) -> tuple[float, float]:
    """Least-squares slope of log y against log x, and the RMS log residual."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3 or xs.size != ys.size:
        raise ValueError("need at least three (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("slope fit needs strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


@dataclass
class SweepResult:
    param: str
    values: list[float]
    distances: dict[str, list[float]]
    slopes: dict[str, tuple[float, float]] = field(default_factory=dict)
    bounds: dict[str, list[float]] = field(default_factory=dict)
    runs: list[RunResult] = field(default_factory=list, repr=False)
    reference: RunResult | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size < 3:
            raise ValueError("a sweep needs at least three parameter values")
        if np.any(np.diff(v) >= 0) or np.any(v < 0):
            raise ValueError("sweep parameter values must be non-negative and strictly decreasing")
        for name, d in self.distances.items():
            if len(d) != v.size or any(x < 0 for x in d):
                raise ValueError(f"bad distance column {name}")

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.distances[name])

    def fit(self):
        for name, d in self.distances.items():
            d = np.asarray(d)
            v = np.asarray(self.values)
            keep = (v > 0) & (d > 0)
            if keep.sum() >= 3:
                self.slopes[name] = fit_slope(v[keep], d[keep])
        return self


def _check_aligned(times, ref_times):
    if len(times) != len(ref_times) or not np.allclose(times, ref_times, rtol=0, atol=1e-12):
        raise ValueError("output times of run and reference do not align")


def nu_distances(times, totals, potentials, ref_totals) -> dict[str, float]:
    """Space-time distances of one Brinkman run to the Darcy reference."""
    T = times
    sq = lambda xs: math.sqrt(max(dg.time_integral(T, xs), 0.0))
    return {
        "l2_n": sq([dg.l2_sq(n - n0) for n, n0 in zip(totals, ref_totals)]),
        "l2_W": sq([dg.l2_sq(W - n0) for W, n0 in zip(potentials, ref_totals)]),
        "h1_W": sq([dg.h1_seminorm(W - n0) for W, n0 in zip(potentials, ref_totals)]),
        "gap2": dg.time_integral(T, [dg.gap_sq(n, W) for n, W in zip(totals, potentials)]),
        "energy_diff": abs(dg.time_integral(T, [dg.grad_sq(W) for W in potentials])
                           - dg.time_integral(T, [dg.h1_seminorm(n0) for n0 in ref_totals])),
    }


def run_bounds(r: RunResult) -> dict[str, float]:
    return {
        "sup_m2": max(x.second_moment for x in r.records),
        "sup_abs_entropy": max(x.abs_entropy for x in r.records),
        "dissipation": dg.time_integral(r.times, [x.dissipation for x in r.records]),
    }


def darcy_reference(base: BrinkmanRunConfig) -> RunResult:
    cfg = DarcyRunConfig(base.grid, base.growth, base.init, base.T_final, cfl_safety=base.cfl_safety,
                         output_dt=base.output_dt, tol_overshoot=base.tol_overshoot,
                         check_growth=base.check_growth, name=f"{base.name}-darcy")
    return darcy_run(cfg)


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def nu_sweep(base: BrinkmanRunConfig, nus, reference: RunResult | None = None, workers: int = 1) -> SweepResult:
    """Run the Brinkman system for each nu and measure distance to the Darcy limit."""
    nus = [float(v) for v in nus]
    if reference is None:
        reference = darcy_reference(base)
    ref_totals = reference.totals()

    def member(nu):
        try:
            return run(replace(base, nu=nu, epsilon=0.0, mode="self_consistent", reference=None,
                               name=f"{base.name}-nu{nu:g}"))
        except (BlowUpError, StabilityError, FloatingPointError) as e:
            raise SweepError(f"run with nu={nu:g} aborted: {e}") from e

    runs = _map(member, nus, workers)
    dist = {c: [] for c in NU_COLUMNS}
    bounds = {"sup_m2": [], "sup_abs_entropy": [], "dissipation": []}
    for r in runs:
        _check_aligned(r.times, reference.times)
        for k, v in nu_distances(r.times, r.totals(), r.potentials, ref_totals).items():
            dist[k].append(v)
        for k, v in run_bounds(r).items():
            bounds[k].append(v)
    return SweepResult("nu", nus, dist, bounds=bounds, runs=runs, reference=reference).fit()


def epsilon_sweep(base: BrinkmanRunConfig, epsilons, mode: str = "frozen_coefficient",
                  workers: int = 1) -> SweepResult:
    """Regularized runs at fixed nu against the eps = 0 Brinkman run."""
    epsilons = [float(e) for e in epsilons]
    reference = run(replace(base, epsilon=0.0, mode="self_consistent", reference=None,
                            record_steps=True, name=f"{base.name}-eps0"))
    ref_totals = reference.totals()

    def member(eps):
        try:
            return run(replace(base, epsilon=eps, mode=mode,
                               reference=reference if mode == "frozen_coefficient" else None,
                               record_steps=False, name=f"{base.name}-eps{eps:g}"))
        except (BlowUpError, StabilityError, FloatingPointError) as e:
            raise SweepError(f"run with epsilon={eps:g} aborted: {e}") from e

    runs = _map(member, epsilons, workers)
    dist = {c: [] for c in EPS_COLUMNS}
    for eps, r in zip(epsilons, runs):
        _check_aligned(r.times, reference.times)
        T = r.times
        totals = r.totals()
        dist["l1"].append(dg.time_integral(T, [dg.l1(n - n0) for n, n0 in zip(totals, ref_totals)]))
        dist["l2"].append(math.sqrt(dg.time_integral(T, [dg.l2_sq(n - n0) for n, n0 in zip(totals, ref_totals)])))
        dist["sqrt_eps_grad"].append(math.sqrt(eps) * math.sqrt(dg.time_integral(T, [dg.h1_seminorm(n) for n in totals])))
    return SweepResult("epsilon", epsilons, dist, runs=runs, reference=reference).fit()


# -- refinement -----------------------------------------------------------------

@dataclass
class RefinementRow:
    N: int
    self_error: float | None
    self_order: float | None
    exact_error: float | None = None
    exact_order: float | None = None


def _order(e_coarse, e_fine):
    if e_coarse is None or e_fine is None or e_fine <= 0 or e_coarse <= 0:
        return None
    return math.log2(e_coarse / e_fine)


def refinement_study(solver: Callable[[int, float], Field], levels, exact: Callable[[Grid], Field] | None = None
                     ) -> list[RefinementRow]:
    """Self-convergence (and optionally exact-error) table over nested grids.

    ``levels`` is a list of (N, dt_scale) with N doubling; ``solver(N, dt_scale)``
    returns the field to compare. The self-convergence error of level k is the
    L1 distance between level k and the restriction of level k+1.
    """
    levels = [(int(N), float(s)) for N, s in levels]
    Ns = [N for N, _ in levels]
    if any(b != 2 * a for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"levels must be nested (N doubling), got {Ns}")
    sols = [solver(N, s) for N, s in levels]
    self_err = [dg.l1(sols[k] - restrict(sols[k + 1])) for k in range(len(sols) - 1)] + [None]
    exact_err = [dg.l1(u - exact(u.grid)) for u in sols] if exact is not None else [None] * len(sols)
    rows = []
    for k, N in enumerate(Ns):
        so = _order(self_err[k - 1], self_err[k]) if k >= 1 else None
        eo = _order(exact_err[k - 1], exact_err[k]) if k >= 1 else None
        rows.append(RefinementRow(N, self_err[k], so, exact_err[k], eo))
    return rows


def format_refinement(rows) -> str:
    f = lambda v: "-" if v is None else f"{v:.4e}"
    o = lambda v: "-" if v is None else f"{v:.3f}"
    lines = ["N, self_error, self_order, exact_error, exact_order"]
    for r in rows:
        lines.append(f"{r.N}, {f(r.self_error)}, {o(r.self_order)}, {f(r.exact_error)}, {o(r.exact_order)}")
    return "\n".join(lines)
