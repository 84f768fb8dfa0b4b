"""
Limit (Darcy) system  d_t n_i - div(n_i grad n) = n_i G_i(n)  and the m=2
Barenblatt profile used to validate it.

Both species are transported by the common face velocity -D+n, upwinded per
face by its sign. Because the flux is linear in n_i, summing the species
updates reproduces the update of the total density exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import diagnostics as dg
from .brinkman import _Recorder, _clamp, _reaction_sup, check_growth_laws, initial_state, upwind_fluxes
from .grid import Field, Grid, divergence_flux, face_gradient
from .growth import GrowthLaw
from .state import RunResult, SpeciesState, StabilityError


@dataclass
class DarcyRunConfig:
    grid: Grid
    growth: tuple[GrowthLaw, GrowthLaw]
    init: tuple
    T_final: float
    cfl_safety: float = 0.45
    output_dt: float | None = None
    t0: float = 0.0
    tol_overshoot: float = 0.05
    record_steps: bool = False
    check_growth: bool = True
    dt_max: float = math.inf
    name: str = "darcy"

    def __post_init__(self):
        if not self.T_final > 0:
            raise ValueError("T_final must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.output_dt is None:
            self.output_dt = self.T_final / 50

    @property
    def n_bar(self) -> float:
        return max(g.n_bar for g in self.growth)

    def output_times(self) -> np.ndarray:
        K = max(1, int(round(self.T_final / self.output_dt)))
        return self.t0 + np.linspace(0.0, self.T_final, K + 1)


def darcy_stable_dt(state: SpeciesState, cfg: DarcyRunConfig) -> float:
    """cfl * min(h^2 / (2 d max n), 1 / sup|G|); ``inf`` when neither applies."""
    g = state.grid
    n_max = float(state.total.values.max())
    limits = [math.inf]
    if n_max > 0:
        limits.append(g.h**2 / (2 * g.dim * n_max))
    gsup = _reaction_sup(cfg.growth, n_max, cfg.n_bar)
    if gsup > 0:
        limits.append(1.0 / gsup)
    return cfg.cfl_safety * min(limits)


def _advance(n1, n2, cfg: DarcyRunConfig, dt):
    grid = cfg.grid
    n = n1 + n2
    vel = [-gn for gn in face_gradient(n, grid.h)]
    out = []
    for v, g in zip((n1, n2), cfg.growth):
        v = v - dt * divergence_flux(upwind_fluxes(v, vel), grid).values
        if not g.is_zero:
            v = v * (1.0 + dt * g(n))
        out.append(_clamp(v, "darcy step"))
    return out[0], out[1]


def darcy_step(state: SpeciesState, cfg: DarcyRunConfig, dt: float) -> SpeciesState:
    limit = darcy_stable_dt(state, cfg)
    if dt > limit * (1 + 1e-12):
        raise StabilityError(f"dt={dt:.3e} exceeds parabolic guard {limit:.3e}")
    if not (np.all(np.isfinite(state.n1.values)) and np.all(np.isfinite(state.n2.values))):
        raise FloatingPointError("non-finite state")
    n1, n2 = _advance(state.n1.values, state.n2.values, cfg, dt)
    return SpeciesState(Field(cfg.grid, n1), Field(cfg.grid, n2), state.t + dt)


def darcy_run(cfg: DarcyRunConfig) -> RunResult:
    if cfg.check_growth:
        check_growth_laws(cfg.growth)
    grid = cfg.grid
    params = {"nu": 0.0, "cfl_safety": cfg.cfl_safety, "T_final": cfg.T_final, "t0": cfg.t0, "name": cfg.name}
    result = RunResult("darcy", grid, tuple(cfg.growth), params)
    rec = _Recorder(result, cfg.n_bar, cfg.tol_overshoot)
    state = initial_state(cfg)
    state.t = cfg.t0
    rec.output(state, state.total)
    n1, n2 = state.n1.values, state.n2.values
    out_times = cfg.output_times()
    t, k, j = cfg.t0, 0, 1
    while j < len(out_times):
        dt = min(darcy_stable_dt(state, cfg), cfg.dt_max)
        target = out_times[j]
        hit = t + dt >= target - 1e-14 * max(1.0, abs(target))
        if hit:
            dt = target - t
        if cfg.record_steps:
            result.step_dts.append(dt)
            result.step_totals.append(n1 + n2)
        n1, n2 = _advance(n1, n2, cfg, dt)
        k += 1
        t = target if hit else t + dt
        rec.guard(k, n1, n2)
        state = SpeciesState(Field(grid, n1), Field(grid, n2), t)
        if hit:
            rec.output(state, state.total)
            j += 1
    result.n_steps = k
    result.params["entropy_residual"] = entropy_equality_residual(result)
    return result


def entropy_equality_residual(result: RunResult) -> float:
    """H(T) + int int |D+ n|^2 - R - H(0); zero for exact solutions."""
    return dg.entropy_inequality_residual(
        result.times, [s.n1 for s in result.states], [s.n2 for s in result.states],
        result.potentials, result.growth, model="darcy")


# -- Barenblatt ------------------------------------------------------------------

def barenblatt_constant(M: float) -> float:
    """C with integral of (C - y^2/12)_+ dy = M, i.e. (4/3) sqrt(12 C) C = M."""
    return (3.0 * M / (4.0 * math.sqrt(12.0))) ** (2.0 / 3.0)


def barenblatt_profile(x, tau: float, M: float):
    """tau^-1/3 (C - x^2 tau^-2/3 / 12)_+, which solves u_tau = (u^2)_xx."""
    if tau <= 0:
        raise ValueError("time must be positive")
    C = barenblatt_constant(M)
    x = np.asarray(x, dtype=float)
    return tau ** (-1.0 / 3.0) * np.maximum(C - x**2 * tau ** (-2.0 / 3.0) / 12.0, 0.0)


def barenblatt_exact(x, t: float, M: float):
    """Self-similar solution of n_t = (n n_x)_x = (n^2)_xx / 2: u(x, t/2)."""
    if t <= 0:
        raise ValueError("time must be positive")
    if M <= 0:
        raise ValueError("mass must be positive")
    return barenblatt_profile(x, t / 2.0, M)


def barenblatt_edge(t: float, M: float) -> float:
    return math.sqrt(12.0 * barenblatt_constant(M)) * (t / 2.0) ** (1.0 / 3.0)


def barenblatt_cell_average(grid: Grid, t: float, M: float) -> Field:
    """Exact cell averages of the Barenblatt profile (d=1)."""
    if grid.dim != 1:
        raise ValueError("Barenblatt oracle is d=1 only")
    tau = t / 2.0
    C = barenblatt_constant(M)
    a = tau ** (-2.0 / 3.0) / 12.0
    edge = math.sqrt(C / a)
    lo = np.clip(grid.centers - grid.h / 2, -edge, edge)
    hi = np.clip(grid.centers + grid.h / 2, -edge, edge)
    prim = lambda s: C * s - a * s**3 / 3.0
    return Field(grid, tau ** (-1.0 / 3.0) * (prim(hi) - prim(lo)) / grid.h)


@dataclass(frozen=True)
class BarenblattInit:
    """Initial data spec: exact cell averages at time ``t0``."""
    t0: float = 1.0
    mass: float = 1.0

    def build(self, grid: Grid) -> Field:
        return barenblatt_cell_average(grid, self.t0, self.mass)
