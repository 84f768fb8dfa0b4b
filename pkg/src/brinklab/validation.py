"""
Acceptance checks at desk scale (d=1, L=20, N=1024, T=1 unless noted).

Each ``criterion_*`` function returns a CriterionResult; ``run_all`` runs the
full list. ``lab validate`` and tests/test_acceptance.py both call these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import diagnostics as dg
from .brinkman import BrinkmanRunConfig, run
from .darcy import BarenblattInit, DarcyRunConfig, barenblatt_cell_average, darcy_run
from .experiments import epsilon_sweep, fit_slope, nu_sweep, refinement_study
from .grid import Grid, integrate
from .growth import make_linear_logistic, validate_growth, zero_growth, GrowthLaw
from .initial import Gaussian, Indicator, Zero
from .kernels import BrinkmanParams, convolve_kernel, fundamental_kernel_1d, helmholtz_residual, solve_helmholtz

L_BOX = 20.0
N_DEFAULT = 1024
T_FINAL = 1.0
NU_SWEEP = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
EPS_SWEEP = (1e-2, 1e-3, 1e-4)
GAP_SLOPE_MIN = 0.8
BARENBLATT_ORDER_MIN = 0.8
BOUND_FACTOR = 3.0
HALVING_BAND = (0.35, 0.65)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"


def default_growth() -> tuple[GrowthLaw, GrowthLaw]:
    return make_linear_logistic(1.0, 1.0), make_linear_logistic(0.5, 0.8)


def two_bump_init():
    return Gaussian(-1.5, 0.8, 1.0), Gaussian(1.5, 0.8, 1.0)


def two_bump_config(N: int = N_DEFAULT, nu: float = 1e-2, growth=None, init=None, **kw) -> BrinkmanRunConfig:
    kw.setdefault("output_dt", T_FINAL / 50)
    return BrinkmanRunConfig(Grid(1, L_BOX, N), nu, growth or default_growth(), init or two_bump_init(),
                             T_FINAL, **kw)


# -- 1, 2: elliptic law ------------------------------------------------------

def criterion_elliptic() -> CriterionResult:
    grid = Grid(1, L_BOX, 2048)
    n = Gaussian(0.0, 1.0, 1.0).build(grid)
    p = BrinkmanParams(0.1)
    W = solve_helmholtz(n, p)
    res = helmholtz_residual(W, n, p) / n.max()
    diff = float(np.abs(W.values - convolve_kernel(n, p, kernel="lattice").values).max())
    cont = float(np.abs(W.values - convolve_kernel(n, p, kernel="continuous").values).max())
    ok = res <= 1e-10 and diff <= 1e-8
    return CriterionResult(1, "elliptic solver exactness", ok,
                           f"relative residual {res:.2e} (<=1e-10), spectral vs lattice-kernel convolution "
                           f"{diff:.2e} (<=1e-8); continuous-kernel route differs by {cont:.2e} = O(h^2)")


def criterion_kernel_mass() -> CriterionResult:
    errs = []
    for nu in (1.0, 0.1, 0.01):
        s = math.sqrt(nu)
        # split at the kink so each half is smooth
        val = sum(quad(lambda x: float(fundamental_kernel_1d(nu, x)), a, b, epsabs=1e-13, epsrel=1e-13)[0]
                  for a, b in ((-40 * s, 0.0), (0.0, 40 * s)))
        errs.append(abs(val - 1.0))
    return CriterionResult(2, "kernel unit mass", max(errs) <= 1e-10,
                           "|mass - 1| = " + ", ".join(f"{e:.1e}" for e in errs) + " for nu = 1, 0.1, 0.01")


# -- 3, 4: conservation and Barenblatt ------------------------------------------

def _max_mass_drift(result) -> float:
    m0 = (result.records[0].mass1, result.records[0].mass2)
    drift = 0.0
    for r in result.records:
        for m, ref in zip((r.mass1, r.mass2), m0):
            drift = max(drift, abs(m - ref) / ref)
    return drift


def criterion_mass() -> CriterionResult:
    zg = (zero_growth(1.0), zero_growth(1.0))
    b = run(two_bump_config(nu=1e-2, growth=zg, dt_max=T_FINAL / 1000))
    d = darcy_run(DarcyRunConfig(Grid(1, L_BOX, N_DEFAULT), zg, two_bump_init(), T_FINAL))
    db, dd = _max_mass_drift(b), _max_mass_drift(d)
    ok = db <= 1e-12 and dd <= 1e-12 and b.n_steps >= 1000 and d.n_steps >= 1000
    return CriterionResult(3, "mass conservation with G = 0", ok,
                           f"Brinkman drift {db:.1e} over {b.n_steps} steps, Darcy drift {dd:.1e} over {d.n_steps} steps")


def barenblatt_table(levels=(256, 512, 1024), M: float = 1.0):
    zg = (zero_growth(1.0), zero_growth(1.0))

    def solve(N, scale):
        cfg = DarcyRunConfig(Grid(1, L_BOX, N), zg, (BarenblattInit(1.0, M), Zero()), T_final=1.0,
                             cfl_safety=0.45 * scale, t0=1.0, output_dt=0.02)
        return darcy_run(cfg).final.total

    return refinement_study(solve, [(N, 1.0) for N in levels], exact=lambda g: barenblatt_cell_average(g, 2.0, M))


def criterion_barenblatt() -> CriterionResult:
    rows = barenblatt_table()
    exact_orders = [r.exact_order for r in rows if r.exact_order is not None]
    self_orders = [r.self_order for r in rows if r.self_order is not None]
    ok = min(exact_orders) >= BARENBLATT_ORDER_MIN and min(self_orders) >= BARENBLATT_ORDER_MIN
    errs = ", ".join(f"{r.exact_error:.2e}" for r in rows)
    return CriterionResult(4, "Barenblatt oracle", ok,
                           f"L1 errors {errs}; exact orders {', '.join(f'{o:.2f}' for o in exact_orders)}; "
                           f"self-convergence order {', '.join(f'{o:.2f}' for o in self_orders)} (>= 0.8)")


# -- 5: entropy inequality --------------------------------------------------

def entropy_refinement(levels=(256, 512, 1024), nu: float = 1e-2):
    out = []
    for k, N in enumerate(levels):
        cad = T_FINAL / 50 / 2**k
        r = run(two_bump_config(N=N, nu=nu, output_dt=cad, dt_max=cad))
        res = dg.entropy_inequality_residual(r.times, [s.n1 for s in r.states], [s.n2 for s in r.states],
                                             r.potentials, r.growth)
        out.append((N, 2 * L_BOX / N, cad, res))
    return out


def criterion_entropy() -> CriterionResult:
    rows = entropy_refinement()
    N0, h0, dt0, r0 = rows[0]
    C = abs(r0) / (h0 + dt0)
    below = all(r <= C * (h + dt) for _, h, dt, r in rows)
    ratios = [abs(b[3]) / abs(a[3]) for a, b in zip(rows, rows[1:])]
    halving = all(HALVING_BAND[0] <= q <= HALVING_BAND[1] for q in ratios)
    return CriterionResult(5, "entropy inequality", below and halving,
                           "residuals " + ", ".join(f"{r:+.3e}" for *_, r in rows)
                           + f" at N={','.join(str(x[0]) for x in rows)}; |r| ratios "
                           + ", ".join(f"{q:.3f}" for q in ratios) + " (halving +-30%)")


# -- 6-8: viscosity sweep ---------------------------------------------------------

@lru_cache(maxsize=2)
def acceptance_nu_sweep(N: int = N_DEFAULT):
    return nu_sweep(two_bump_config(N=N), NU_SWEEP)


def criterion_gap_rate() -> CriterionResult:
    sw = acceptance_nu_sweep()
    slope, resid = sw.slopes["gap2"]
    return CriterionResult(6, "Brinkman gap rate", slope >= GAP_SLOPE_MIN,
                           f"slope of log gap vs log nu = {slope:.3f} (>= {GAP_SLOPE_MIN}), fit rms {resid:.2e}")


def _non_increasing(xs) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


def criterion_inviscid() -> CriterionResult:
    sw = acceptance_nu_sweep()
    tail = {k: list(sw.column(k)[-3:]) for k in ("l2_n", "l2_W", "h1_W")}
    ok_tail = all(_non_increasing(v) for v in tail.values())
    e = list(sw.column("energy_diff"))
    ok_e = all(b < a for a, b in zip(e, e[1:]))
    parts = [f"{k} tail " + "/".join(f"{x:.2e}" for x in v) for k, v in tail.items()]
    parts.append("energy_diff " + "/".join(f"{x:.2e}" for x in e))
    return CriterionResult(7, "inviscid convergence", ok_tail and ok_e, "; ".join(parts))


def criterion_uniform_bounds() -> CriterionResult:
    sw = acceptance_nu_sweep()
    ratios = {k: max(v) / min(v) for k, v in sw.bounds.items()}
    ok = all(r <= BOUND_FACTOR for r in ratios.values())
    return CriterionResult(8, "uniform bounds across nu", ok,
                           ", ".join(f"{k} max/min {r:.3f}" for k, r in ratios.items()) + f" (<= {BOUND_FACTOR})")


# -- 9: regularization -----------------------------------------------------------

@lru_cache(maxsize=1)
def acceptance_eps_sweep():
    return epsilon_sweep(two_bump_config(nu=1e-2), EPS_SWEEP, mode="frozen_coefficient")


def criterion_regularization() -> CriterionResult:
    sw = acceptance_eps_sweep()
    l1 = list(sw.column("l1"))
    g = list(sw.column("sqrt_eps_grad"))
    decreasing = all(b < a for a, b in zip(l1, l1[1:]))
    spread = max(g) / min(g)
    upper = max(g) / g[0]
    ok = decreasing and spread <= BOUND_FACTOR
    return CriterionResult(9, "epsilon regularization", ok,
                           "L1(L1) distance " + "/".join(f"{x:.3e}" for x in l1)
                           + f" ({'strictly decreasing' if decreasing else 'NOT decreasing'}); "
                           + "sqrt(eps)|grad n|_L2L2 " + "/".join(f"{x:.4f}" for x in g)
                           + f", max/min {spread:.2f} (<= {BOUND_FACTOR}); max/first {upper:.2f}")


# -- 10, 11 -------------------------------------------------------------------------

def criterion_segregation() -> CriterionResult:
    zg = (zero_growth(1.0), zero_growth(1.0))
    # slabs touching at x = 0; the only initial overlap is the 2-cell mollification
    cfg = two_bump_config(nu=1e-2, growth=zg, init=(Indicator(-1.0, 1.0, 0.9), Indicator(1.0, 1.0, 0.9)))
    r = run(cfg)
    ov = [rec.overlap for rec in r.records]
    n_bar = max(g.n_bar for g in zg)
    bound = ov[0] + 10 * cfg.grid.h * n_bar**2 * L_BOX
    return CriterionResult(10, "segregation", ov[-1] <= bound,
                           f"overlap {ov[0]:.3e} -> {ov[-1]:.3e} at T=1 (max over run {max(ov):.3e}), "
                           f"bound {bound:.3e}")


def criterion_growth_validator() -> CriterionResult:
    lin = validate_growth(make_linear_logistic(1.0, 1.0), 256)
    sin = validate_growth(GrowthLaw(np.sin, 0.5, 1.0, "sin"), 256)
    quad_ = validate_growth(GrowthLaw(lambda n: 1 - np.asarray(n) ** 2, 0.1, 1.0, "1-n^2"), 256)
    ok = lin.passed and "G2" in sin.failed and quad_.failed == ["G2"]
    return CriterionResult(11, "growth validator", ok,
                           f"linear passes={lin.passed}; sin fails {sin.failed}; 1-n^2 fails {quad_.failed}")


CRITERIA = (
    criterion_elliptic,
    criterion_kernel_mass,
    criterion_mass,
    criterion_barenblatt,
    criterion_entropy,
    criterion_gap_rate,
    criterion_inviscid,
    criterion_uniform_bounds,
    criterion_regularization,
    criterion_segregation,
    criterion_growth_validator,
)


def run_all(report=print) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        res = crit()
        report(res.line())
        results.append(res)
    return results
