import numpy as np
import pytest

from brinklab.growth import GrowthLaw, growth_zero, make_linear_logistic, validate_growth, zero_growth


def test_linear_logistic_values():
    g = make_linear_logistic(1.0, 1.0)
    assert [g(0.0), g(1.0), g(2.0)] == [1.0, 0.0, -1.0]


@pytest.mark.parametrize("alpha,n_bar", [(1.0, 1.0), (0.5, 0.8), (1e-3, 50.0), (20.0, 0.01)])
def test_linear_logistic_validates(alpha, n_bar):
    r = validate_growth(make_linear_logistic(alpha, n_bar))
    assert r.passed, str(r)
    assert [c.name for c in r.checks] == ["G1", "G2", "G3"]


@pytest.mark.parametrize("alpha,n_bar", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_linear_logistic_rejects_bad_parameters(alpha, n_bar):
    with pytest.raises(ValueError):
        make_linear_logistic(alpha, n_bar)


def test_sine_fails_monotonicity():
    r = validate_growth(GrowthLaw(np.sin, 0.5, 1.0, "sin"))
    assert "G2" in r.failed
    assert not r.passed


def test_one_minus_square_fails_only_monotonicity():
    r = validate_growth(GrowthLaw(lambda n: 1 - n**2, 0.1, 1.0, "1-n^2"))
    assert r.failed == ["G2"]
    g2 = next(c for c in r.checks if c.name == "G2")
    assert g2.margin < 0


def test_non_finite_law_fails_regularity():
    r = validate_growth(GrowthLaw(lambda n: np.log(1.5 - n) - n, 1.0, 1.0, "log"))
    assert "G1" in r.failed
    r = validate_growth(GrowthLaw(lambda n: -1e7 * np.abs(n - 0.37), 1.0, 1.0, "kink"))
    assert "G1" in r.failed


def test_report_never_raises_and_prints():
    r = validate_growth(GrowthLaw(lambda n: np.full_like(n, np.nan), 1.0, 1.0, "nan"))
    assert not r.passed
    assert "FAIL" in str(r)


def test_needs_enough_samples():
    with pytest.raises(ValueError):
        validate_growth(make_linear_logistic(1, 1), samples=10)


def test_zero_growth_is_flagged_inadmissible():
    assert zero_growth().is_zero
    assert not validate_growth(zero_growth()).passed


@pytest.mark.parametrize("law", [
    make_linear_logistic(2.0, 0.7),
    GrowthLaw(lambda n: 0.5 * (1.0 - n) - (n - 1.0) ** 3, 0.5, 1.0, "cubic"),
    GrowthLaw(lambda n: np.exp(-n) - np.exp(-0.9) - 0.3 * (n - 0.9), 0.3, 0.9, "exp"),
])
def test_accepted_laws_integrated_monotonicity_and_zero(law):
    assert validate_growth(law).passed
    n = np.linspace(0.0, 2 * law.n_bar, 1000)
    assert np.all(law(n) <= law(0.0) - law.alpha * n + 1e-6)
    z = growth_zero(law)
    assert 0 < z <= law.n_bar
    assert abs(law(z)) < 1e-10
