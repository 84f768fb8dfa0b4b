"""
Density-dependent growth rates and sampled checks of the three standing
assumptions: C^1 regularity (G1), slope bounded by -alpha (G2) and
non-positivity beyond a critical density (G3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

SLOPE_TOL = 1e-8
SIGN_TOL = 1e-12
CURVATURE_CAP = 1e8


class _Linear:
    # module-level callable so laws stay picklable
    def __init__(self, alpha, n_bar):
        self.alpha = alpha
        self.n_bar = n_bar

    def __call__(self, n):
        return self.alpha * (self.n_bar - np.asarray(n, dtype=float))


class _Zero:
    def __call__(self, n):
        return np.zeros_like(np.asarray(n, dtype=float))


@dataclass
class GrowthLaw:
    evaluate: Callable
    alpha: float
    n_bar: float
    label: str = ""

    def __call__(self, n):
        return self.evaluate(n)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.evaluate, _Zero)

    def sup_norm(self, n_max: float, samples: int = 257) -> float:
        """max |G| on [0, n_max] by sampling."""
        n = np.linspace(0.0, max(n_max, 0.0), samples)
        return float(np.abs(self.evaluate(n)).max())


def make_linear_logistic(alpha: float, n_bar: float) -> GrowthLaw:
    if not (alpha > 0 and n_bar > 0):
        raise ValueError(f"alpha and n_bar must be positive, got {alpha}, {n_bar}")
    return GrowthLaw(_Linear(alpha, n_bar), alpha, n_bar, f"linear(alpha={alpha:g}, n_bar={n_bar:g})")


def zero_growth(n_bar: float = 1.0) -> GrowthLaw:
    """G = 0. Not an admissible law (no strict decrease); used for pure transport runs."""
    return GrowthLaw(_Zero(), 0.0, n_bar, "zero")


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class GrowthReport:
    label: str
    checks: list[AssumptionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __str__(self):
        lines = [f"growth law {self.label}:"]
        for c in self.checks:
            lines.append(f"  {c.name}: {'pass' if c.passed else 'FAIL'} (margin {c.margin:+.3e}) {c.detail}")
        return "\n".join(lines)


def validate_growth(g: GrowthLaw, samples: int = 256) -> GrowthReport:
    """Check (G1)-(G3) on a uniform sample of [0, 2 n_bar].

    Failures are reported, never raised. Margins are positive when the
    assumption holds with room to spare.
    """
    if samples < 64:
        raise ValueError("need at least 64 samples")
    report = GrowthReport(g.label or repr(g.evaluate))
    n = np.linspace(0.0, 2.0 * g.n_bar, samples)
    dn = n[1] - n[0]
    with np.errstate(all="ignore"):
        G = np.asarray(g.evaluate(n), dtype=float)

    finite = bool(np.all(np.isfinite(G)))
    if finite:
        curv = np.abs(G[2:] - 2 * G[1:-1] + G[:-2]) / dn**2
        worst = float(curv.max())
        ok = worst <= CURVATURE_CAP
        report.checks.append(AssumptionCheck("G1", ok, CURVATURE_CAP - worst, f"max |G''| ~ {worst:.3e}"))
    else:
        report.checks.append(AssumptionCheck("G1", False, -np.inf, "non-finite values"))
        G = np.nan_to_num(G, nan=np.inf)

    with np.errstate(invalid="ignore"):
        slopes = np.nan_to_num(np.diff(G) / dn, nan=np.inf)
    k = int(np.argmax(slopes))
    margin = float(-g.alpha - slopes[k])
    ok = g.alpha > 0 and slopes[k] <= -g.alpha + SLOPE_TOL
    report.checks.append(
        AssumptionCheck("G2", ok, margin, f"worst slope {slopes[k]:+.4f} near n={n[k]:.4f}, need <= {-g.alpha:g}")
    )

    beyond = n >= g.n_bar
    j = int(np.argmax(np.where(beyond, G, -np.inf)))
    ok = G[j] <= SIGN_TOL
    report.checks.append(AssumptionCheck("G3", bool(ok), float(-G[j]), f"max G on [n_bar, 2 n_bar] = {G[j]:+.4e}"))
    return report


def growth_zero(g: GrowthLaw) -> float:
    """The unique root of G in (0, n_bar]; requires G(0) > 0 >= G(n_bar)."""
    a, b = 0.0, g.n_bar
    Ga, Gb = float(g(a)), float(g(b))
    if Gb == 0.0:
        return b
    if not (Ga > 0 > Gb):
        raise ValueError(f"no sign change of G on [0, n_bar]: G(0)={Ga}, G(n_bar)={Gb}")
    return brentq(lambda s: float(g(s)), a, b, xtol=1e-14)
