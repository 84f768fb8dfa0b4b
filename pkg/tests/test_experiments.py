from dataclasses import replace

import numpy as np
import pytest

from brinklab.brinkman import BrinkmanRunConfig
from brinklab.experiments import (SweepError, SweepResult, darcy_reference, epsilon_sweep, fit_slope,
                                  format_refinement, nu_distances, nu_sweep, refinement_study)
from brinklab.grid import Field, Grid
from brinklab.growth import GrowthLaw, make_linear_logistic
from brinklab.initial import Gaussian

LOGISTIC = (make_linear_logistic(1.0, 1.0), make_linear_logistic(0.5, 0.8))


def base(N=256, **kw):
    return BrinkmanRunConfig(Grid(1, 20.0, N), 1e-2, LOGISTIC, (Gaussian(-1.5, 0.8, 1.0), Gaussian(1.5, 0.8, 1.0)),
                             1.0, **kw)


def test_fit_slope_examples():
    xs = np.array([1e-3, 1e-2, 1e-1, 1.0])
    s, r = fit_slope(xs, xs)
    assert s == pytest.approx(1.0, abs=1e-12) and r == pytest.approx(0.0, abs=1e-12)
    assert fit_slope(xs, xs**2)[0] == pytest.approx(2.0, abs=1e-12)
    rng = np.random.default_rng(0)
    xs = np.logspace(-3, 0, 8)
    ys = 3 * xs**1.5 * (1 + 1e-3 * rng.standard_normal(8))
    assert fit_slope(xs, ys)[0] == pytest.approx(1.5, abs=0.01)


@pytest.mark.parametrize("xs,ys", [([1, 2], [1, 2]), ([1, -2, 3], [1, 2, 3]), ([1, 2, 3], [1, 0, 3])])
def test_fit_slope_rejects_bad_input(xs, ys):
    with pytest.raises(ValueError):
        fit_slope(xs, ys)


@pytest.mark.parametrize("values", [[1e-1, 1e-2], [1e-1, 1e-1, 1e-2], [1e-3, 1e-2, 1e-1], [1.0, 0.5, -0.1]])
def test_sweep_result_invariants(values):
    with pytest.raises(ValueError):
        SweepResult("nu", values, {})


@pytest.fixture(scope="module")
def small_nu_sweep():
    return nu_sweep(base(), [1e-1, 1e-2, 1e-3])


def test_nu_sweep_shape_and_rates(small_nu_sweep):
    sw = small_nu_sweep
    for name in ("l2_n", "l2_W", "h1_W", "gap2", "energy_diff"):
        col = sw.column(name)
        assert col.shape == (3,) and np.all(col > 0)
        assert np.all(np.diff(col) < 0)
    assert sw.slopes["gap2"][0] >= 0.8
    assert set(sw.bounds) == {"sup_m2", "sup_abs_entropy", "dissipation"}


def test_nu_sweep_with_huge_nu_then_monotone():
    sw = nu_sweep(base(), [1e3, 1e-1, 1e-2, 1e-3])
    l2W = sw.column("l2_W")
    assert all(b < a for a, b in zip(l2W, l2W[1:]))


def test_nu_sweep_reproducible(small_nu_sweep):
    again = nu_sweep(base(), [1e-1, 1e-2, 1e-3])
    assert again.distances == small_nu_sweep.distances


def test_parallel_sweep_matches_serial(small_nu_sweep):
    par = nu_sweep(base(), [1e-1, 1e-2, 1e-3], reference=small_nu_sweep.reference, workers=3)
    assert par.distances == small_nu_sweep.distances


def test_self_distance_is_zero(small_nu_sweep):
    r = small_nu_sweep.runs[0]
    d = nu_distances(r.times, r.totals(), r.totals(), r.totals())
    assert d["l2_n"] == 0.0 and d["l2_W"] == 0.0 and d["h1_W"] == 0.0 and d["energy_diff"] == 0.0


def test_darcy_reference_aligned(small_nu_sweep):
    ref = darcy_reference(base())
    assert ref.times == small_nu_sweep.reference.times
    assert ref.model == "darcy"


def test_epsilon_sweep_zero_member():
    sw = epsilon_sweep(base(), [1e-2, 1e-3, 0.0])
    assert sw.column("l1")[-1] == 0.0 and sw.column("l2")[-1] == 0.0
    assert sw.column("l1")[0] > sw.column("l1")[1] > 0


def test_sweep_aborts_naming_offending_value():
    # n_bar far below the initial peak trips the blow-up guard in every member
    tight = GrowthLaw(make_linear_logistic(1.0, 1.0).evaluate, 1.0, 0.05, "tight")
    cfg = replace(base(), growth=(tight, tight), check_growth=False)
    ref = darcy_reference(base())
    with pytest.raises(SweepError, match="nu=0.1"):
        nu_sweep(cfg, [1e-1, 1e-2, 1e-3], reference=ref)


def test_refinement_identical_levels_zero_error():
    def solve(N, scale):
        g = Grid(1, 1.0, N)
        return Field(g, np.full(N, 2.0))

    rows = refinement_study(solve, [(16, 1.0), (32, 1.0), (64, 1.0)], exact=lambda g: Field(g, np.full(g.N, 2.0)))
    assert all(r.self_error in (0.0, None) for r in rows)
    assert all(r.exact_error == 0.0 for r in rows)
    assert "N, self_error" in format_refinement(rows)


def test_refinement_first_order_oracle():
    # cell averages of x on a half-cell shifted grid: error exactly h/2 per unit length
    def solve(N, scale):
        g = Grid(1, 1.0, N)
        return Field(g, g.centers + g.h / 2)

    rows = refinement_study(solve, [(16, 1), (32, 1), (64, 1)], exact=lambda g: Field(g, g.centers))
    assert rows[1].exact_order == pytest.approx(1.0, abs=1e-12)
    assert rows[2].exact_order == pytest.approx(1.0, abs=1e-12)


def test_refinement_requires_nested_levels():
    with pytest.raises(ValueError):
        refinement_study(lambda N, s: None, [(16, 1), (48, 1)])
