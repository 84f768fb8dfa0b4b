"""
Two-species Brinkman system and its epsilon-regularization.

One step is a Lie splitting in fixed order:

  (a) elliptic solve  W = (I - nu Lap_h)^-1 n
  (b) donor-cell transport of each species with face velocity -D+W
  (c) reaction        n_i <- n_i (1 + dt G_i(n)),  n taken at the start of the step
  (d) if eps > 0, one backward-Euler heat step per species

In frozen-coefficient mode, W and the reaction argument in (a) and (c) are
taken from a stored reference run instead of the evolving state.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from .grid import Field, Grid, divergence_flux, face_gradient, laplacian_symbol
from .growth import GrowthLaw, validate_growth
from .initial import build_sum, check_truncation
from .kernels import BrinkmanParams, helmholtz_residual, solve_helmholtz
from .state import BlowUpError, RunResult, SpeciesState, StabilityError

log = logging.getLogger(__name__)

MODES = ("self_consistent", "frozen_coefficient")
DT_SLACK = 1e-12


@dataclass
class BrinkmanRunConfig:
    grid: Grid
    nu: float
    growth: tuple[GrowthLaw, GrowthLaw]
    init: tuple
    T_final: float
    epsilon: float = 0.0
    cfl_safety: float = 0.45
    mode: str = "self_consistent"
    output_dt: float | None = None
    reference: RunResult | None = None
    tol_overshoot: float = 0.05
    record_steps: bool = False
    check_growth: bool = True
    dt_max: float = math.inf
    name: str = "brinkman"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        BrinkmanParams(self.nu)
        if not self.T_final > 0:
            raise ValueError("T_final must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "frozen_coefficient":
            ref = self.reference
            if ref is None or not ref.step_dts:
                raise ValueError("frozen_coefficient mode needs a reference run recorded with record_steps=True")
            if ref.grid != self.grid:
                raise ValueError("reference run lives on a different grid")
        if self.output_dt is None:
            self.output_dt = self.T_final / 50

    @property
    def n_bar(self) -> float:
        return max(g.n_bar for g in self.growth)

    def output_times(self) -> np.ndarray:
        K = max(1, int(round(self.T_final / self.output_dt)))
        return np.linspace(0.0, self.T_final, K + 1)


def upwind_fluxes(n: np.ndarray, velocities: list[np.ndarray]) -> list[np.ndarray]:
    """Donor-cell face fluxes v+ n[i] + v- n[i+1] along each axis."""
    return [np.maximum(v, 0.0) * n + np.minimum(v, 0.0) * np.roll(n, -1, axis=k)
            for k, v in enumerate(velocities)]


def _reaction_sup(growth, n_max: float, n_bar: float) -> float:
    return max(g.sup_norm(max(n_bar, n_max)) for g in growth)


def stable_dt(state: SpeciesState, W: Field, cfg: BrinkmanRunConfig) -> float:
    """Largest admissible step; ``inf`` when no guard applies.

    Guards (each multiplied by cfl_safety and skipped when its denominator
    vanishes): advective h / max|D+W|, reaction 1 / max_i sup|G_i|,
    diffusive h^2 / (2 d eps), and the elliptic-coupling guard
    (h^2 + 4 d nu) / (2 d max n), which is the explicit-Euler limit of the
    linearized system n_t = n Lap (I - nu Lap)^-1 n.
    """
    g = state.grid
    h, d = g.h, g.dim
    n_max = float(state.total.values.max())
    limits = [math.inf]
    vmax = max(float(np.abs(gw).max()) for gw in face_gradient(W.values, h))
    if vmax > 0:
        limits.append(h / vmax)
    gsup = _reaction_sup(cfg.growth, n_max, cfg.n_bar)
    if gsup > 0:
        limits.append(1.0 / gsup)
    if cfg.epsilon > 0:
        limits.append(h * h / (2 * d * cfg.epsilon))
    if n_max > 0:
        limits.append((h * h + 4 * d * cfg.nu) / (2 * d * n_max))
    return cfg.cfl_safety * min(limits)


def _clamp(v: np.ndarray, what: str) -> np.ndarray:
    lo = v.min()
    if lo < 0:
        if lo < -dg.NEG_CLAMP:
            log.warning("%s: clamping negative value %.3e", what, lo)
        else:
            log.debug("%s: clamping rounding noise %.3e", what, lo)
        v = np.maximum(v, 0.0)
    return v


def _heat_step(v: np.ndarray, grid: Grid, coeff: float) -> np.ndarray:
    sym = 1.0 + coeff * laplacian_symbol(grid)
    axes = tuple(range(grid.dim))
    return np.fft.irfftn(np.fft.rfftn(v, axes=axes) / sym, s=grid.shape, axes=axes)


def advance(n1: np.ndarray, n2: np.ndarray, W: np.ndarray, n_arg: np.ndarray,
            cfg: BrinkmanRunConfig, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Steps (b)-(d) for given potential W and reaction argument n_arg."""
    grid = cfg.grid
    vel = [-gw for gw in face_gradient(W, grid.h)]
    out = []
    for v, g in zip((n1, n2), cfg.growth):
        v = v - dt * divergence_flux(upwind_fluxes(v, vel), grid).values
        if not g.is_zero:
            v = v * (1.0 + dt * g(n_arg))
        if cfg.epsilon > 0:
            v = _heat_step(v, grid, dt * cfg.epsilon)
        out.append(_clamp(v, "brinkman step"))
    return out[0], out[1]


def _frozen_inputs(cfg: BrinkmanRunConfig, t: float):
    ref = cfg.reference
    elapsed = np.cumsum([0.0] + ref.step_dts)
    k = int(np.argmin(np.abs(elapsed - t)))
    if k >= len(ref.step_totals) or abs(elapsed[k] - t) > 1e-12 * max(1.0, t):
        raise ValueError(f"time {t} is not a step time of the reference run")
    n_arg = ref.step_totals[k]
    return solve_helmholtz(Field(cfg.grid, n_arg), cfg.nu), n_arg


def step(state: SpeciesState, cfg: BrinkmanRunConfig, dt: float) -> SpeciesState:
    """One full split step of length dt."""
    if cfg.mode == "frozen_coefficient":
        W, n_arg = _frozen_inputs(cfg, state.t)
    else:
        n_arg = state.total.values
        W = solve_helmholtz(state.total, cfg.nu)
    limit = stable_dt(state, W, cfg)
    if dt > limit * (1 + DT_SLACK):
        raise StabilityError(f"dt={dt:.3e} exceeds stability guard {limit:.3e}")
    n1, n2 = advance(state.n1.values, state.n2.values, W.values, n_arg, cfg, dt)
    return SpeciesState(Field(cfg.grid, n1), Field(cfg.grid, n2), state.t + dt)


def initial_state(cfg) -> SpeciesState:
    n1 = build_sum(cfg.init[0], cfg.grid)
    n2 = build_sum(cfg.init[1], cfg.grid)
    check_truncation(n1 + n2, what=f"{cfg.name} initial data")
    return SpeciesState(n1, n2, 0.0)


def check_growth_laws(growth) -> None:
    for g in growth:
        if g.is_zero:
            continue
        report = validate_growth(g)
        if not report.passed:
            raise ValueError(f"growth law rejected:\n{report}")


class _Recorder:
    """Shared bookkeeping for Brinkman and Darcy drivers."""

    def __init__(self, result: RunResult, n_bar: float, tol_overshoot: float):
        self.result = result
        self.n_bar = n_bar
        self.tol = tol_overshoot
        self.warned = False

    def guard(self, k: int, n1: np.ndarray, n2: np.ndarray):
        if not (np.all(np.isfinite(n1)) and np.all(np.isfinite(n2))):
            raise BlowUpError(k, "non-finite density")
        m = float((n1 + n2).max())
        if m > 10 * self.n_bar:
            raise BlowUpError(k, f"max density {m:.3e} exceeds 10 n_bar")
        ratio = m / self.n_bar
        self.result.max_ceiling_ratio = max(self.result.max_ceiling_ratio, ratio)
        if ratio > 1 + self.tol and not self.warned:
            log.warning("max density %.4f exceeds n_bar (1 + %.2f) at step %d", m, self.tol, k)
            self.warned = True

    def output(self, state: SpeciesState, W: Field):
        r = self.result
        rec = dg.make_record(state.t, state.n1, state.n2, W)
        if rec.abs_entropy > dg.abs_entropy_bound(state.total) + 1e-12:
            r.entropy_bound_violations += 1
            log.error("entropy bound violated at t=%.4f", state.t)
        r.times.append(state.t)
        r.states.append(state)
        r.potentials.append(W)
        r.records.append(rec)


def run(cfg: BrinkmanRunConfig) -> RunResult:
    """Integrate to T_final, recording diagnostics at each output time."""
    if cfg.check_growth:
        check_growth_laws(cfg.growth)
    grid = cfg.grid
    params = {"nu": cfg.nu, "epsilon": cfg.epsilon, "mode": cfg.mode,
              "cfl_safety": cfg.cfl_safety, "T_final": cfg.T_final, "name": cfg.name}
    result = RunResult("brinkman", grid, tuple(cfg.growth), params)
    rec = _Recorder(result, cfg.n_bar, cfg.tol_overshoot)
    if cfg.mode == "frozen_coefficient":
        return _run_frozen(cfg, result, rec)

    state = initial_state(cfg)
    n1, n2 = state.n1.values, state.n2.values
    W = solve_helmholtz(state.total, cfg.nu)
    rec.output(state, W)
    out_times = cfg.output_times()
    t, k, j = 0.0, 0, 1
    while j < len(out_times):
        n_arg = n1 + n2
        dt = min(stable_dt(state, W, cfg), cfg.dt_max)
        target = out_times[j]
        hit = t + dt >= target * (1 - 1e-14)
        if hit:
            dt = target - t
        if cfg.record_steps:
            result.step_dts.append(dt)
            result.step_totals.append(n_arg)
        n1, n2 = advance(n1, n2, W.values, n_arg, cfg, dt)
        k += 1
        t = target if hit else t + dt
        rec.guard(k, n1, n2)
        state = SpeciesState(Field(grid, n1), Field(grid, n2), t)
        n = state.total
        W = solve_helmholtz(n, cfg.nu)
        res = helmholtz_residual(W, n, cfg.nu) / max(n.max(), 1e-300)
        result.max_elliptic_residual = max(result.max_elliptic_residual, res)
        if hit:
            rec.output(state, W)
            j += 1
    result.n_steps = k
    return result


def _run_frozen(cfg: BrinkmanRunConfig, result: RunResult, rec: _Recorder) -> RunResult:
    ref = cfg.reference
    grid = cfg.grid
    ref_out = set(ref.times)
    state = initial_state(cfg)
    n1, n2 = state.n1.values, state.n2.values
    rec.output(state, solve_helmholtz(Field(grid, ref.step_totals[0]), cfg.nu))
    t = 0.0
    k = 0
    for dt_ref, n_arg in zip(ref.step_dts, ref.step_totals):
        W = solve_helmholtz(Field(grid, n_arg), cfg.nu)
        limit = stable_dt(SpeciesState(Field(grid, n1), Field(grid, n2), t), W, cfg)
        m = max(1, math.ceil(dt_ref / limit - 1e-12))
        for _ in range(m):
            n1, n2 = advance(n1, n2, W.values, n_arg, cfg, dt_ref / m)
        k += m
        t = t + dt_ref
        rec.guard(k, n1, n2)
        if cfg.record_steps:
            result.step_dts.append(dt_ref)
            result.step_totals.append(n_arg)
        # snap onto the reference output clock
        near = min(ref_out, key=lambda s: abs(s - t))
        if abs(near - t) <= 1e-12 * max(1.0, t):
            t = near
            state = SpeciesState(Field(grid, n1), Field(grid, n2), t)
            idx = ref.times.index(near)
            rec.output(state, ref.potentials[idx])
    result.n_steps = k
    return result


# -- weak-form residual ---------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """phi(x, t) = bump(|x - center| / radius) * cos(pi t / (2 T)); vanishes at t = T."""
    center: float = 0.0
    radius: float = 3.0
    T: float = 1.0

    __test__ = False  # keep pytest from collecting this

    def space(self, grid: Grid) -> np.ndarray:
        r2 = sum((x - self.center) ** 2 for x in grid.coords) / self.radius**2
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(r2 < 1, np.exp(1.0 - 1.0 / (1.0 - np.minimum(r2, 1 - 1e-300))), 0.0)

    def time(self, t: float) -> float:
        return math.cos(0.5 * math.pi * t / self.T)


def weak_residual(result: RunResult, phi: TestFunction | None = None) -> float:
    """Discrete residual of the weak formulation, summed over species.

    For each species the identity
        int int n phi_t - int int n grad W . grad phi + int int phi n G(n) + int phi(0) n(0) = 0
    is evaluated with face quadrature in space. The phi_t term uses exact
    increments of phi between output times against the interval-mean density,
    so it telescopes against the initial term for a constant state; the other
    time integrals use the trapezoid rule. For Darcy runs W is the density
    itself.
    """
    grid = result.grid
    if phi is None:
        phi = TestFunction(T=result.times[-1])
    psi = phi.space(grid)
    dpsi = face_gradient(psi, grid.h)
    vol = grid.cell_volume
    total = 0.0
    for i in range(2):
        a, b, c = [], [], []
        for t, s, W in zip(result.times, result.states, result.potentials):
            ni = (s.n1, s.n2)[i].values
            n = s.n1.values + s.n2.values
            a.append(vol * (ni * psi).sum())
            flux = sum((0.5 * (ni + np.roll(ni, -1, axis=k)) * dw * dp).sum()
                       for k, (dw, dp) in enumerate(zip(face_gradient(W.values, grid.h), dpsi)))
            b.append(vol * flux * phi.time(t))
            c.append(vol * (psi * ni * result.growth[i](n)).sum() * phi.time(t))
        n0 = (result.states[0].n1, result.states[0].n2)[i].values
        ts = result.times
        dphi = [phi.time(t1) - phi.time(t0) for t0, t1 in zip(ts, ts[1:])]
        a_int = sum(0.5 * (a0 + a1) * d for a0, a1, d in zip(a, a[1:], dphi))
        r = (a_int - dg.time_integral(result.times, b)
             + dg.time_integral(result.times, c) + vol * (psi * n0).sum() * phi.time(result.times[0]))
        total += abs(r)
    return total
