"""
Functionals of discrete states: entropy, moments, dissipation, Brinkman gap,
segregation overlap and the entropy (in)equality residuals.

Gradient-squared quantities use forward face differences, which pair with the
3/5-point Laplacian through summation by parts:
``-integrate(f * Lap_h g) == sum_faces h^d D+f D+g`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .grid import Field, check_same_grid, face_gradient, integrate, laplacian_values

LOG_FLOOR = 1e-30
NEG_CLAMP = 1e-12

CSV_COLUMNS = ("t", "mass1", "mass2", "entropy", "abs_entropy", "m2", "dissip",
               "neg_nlapW", "gradW2", "gap2", "overlap", "linf", "h1")


def _nonneg(f: Field) -> np.ndarray:
    v = f.values
    return np.where(v > 0, v, 0.0)


def _safe_log(v: np.ndarray) -> np.ndarray:
    # log with a floor on {v > 0}; callers zero the integrand where v == 0
    return np.log(np.maximum(v, LOG_FLOOR))


def entropy(f: Field) -> float:
    """H[f] = integral of f (log f - 1), with 0 (log 0 - 1) := 0."""
    v = _nonneg(f)
    dens = np.where(v > 0, v * (_safe_log(v) - 1.0), 0.0)
    return float(f.grid.cell_volume * dens.sum())


def abs_entropy(f: Field) -> float:
    v = _nonneg(f)
    dens = np.where(v > 0, v * np.abs(_safe_log(v)), 0.0)
    return float(f.grid.cell_volume * dens.sum())


def second_moment(f: Field) -> float:
    return float(f.grid.cell_volume * (f.values * f.grid.radius_sq).sum())


def _face_avg(v: np.ndarray, axis: int) -> np.ndarray:
    return 0.5 * (v + np.roll(v, -1, axis=axis))


def h1_seminorm(f: Field) -> float:
    """Squared discrete H^1 seminorm, sum over faces of h^d |D+ f|^2."""
    g = f.grid
    return float(g.cell_volume * sum((d**2).sum() for d in face_gradient(f.values, g.h)))


grad_sq = h1_seminorm


def dissipation(n: Field, W: Field) -> float:
    """integral of n |grad W|^2 with n averaged onto faces."""
    g = check_same_grid(n, W)
    total = 0.0
    for k, d in enumerate(face_gradient(W.values, g.h)):
        total += (_face_avg(n.values, k) * d**2).sum()
    return float(g.cell_volume * total)


def neg_n_lap_W(n: Field, W: Field) -> float:
    """-integral of n Lap_h W."""
    g = check_same_grid(n, W)
    return float(-g.cell_volume * (n.values * laplacian_values(W.values, g.h)).sum())


def gap_sq(n: Field, W: Field) -> float:
    check_same_grid(n, W)
    return l2_sq(n - W)


def overlap(n1: Field, n2: Field) -> float:
    check_same_grid(n1, n2)
    return integrate(n1 * n2)


def l2_sq(f: Field) -> float:
    return float(f.grid.cell_volume * (f.values**2).sum())


def l1(f: Field) -> float:
    return float(f.grid.cell_volume * np.abs(f.values).sum())


def reaction_entropy_rate(n1: Field, n2: Field, growth) -> float:
    """integral of log n [n1 G1(n) + n2 G2(n)], zero where n == 0."""
    g = check_same_grid(n1, n2)
    n = n1.values + n2.values
    src = n1.values * growth[0](n) + n2.values * growth[1](n)
    dens = np.where(n > 0, _safe_log(n) * src, 0.0)
    return float(g.cell_volume * dens.sum())


def abs_entropy_bound(f: Field) -> float:
    """Right-hand side ||f||_inf ||f||_1 + second moment + 1/e of the entropy bound."""
    v = _nonneg(f)
    return float(v.max() * f.grid.cell_volume * v.sum() + second_moment(Field(f.grid, v)) + math.exp(-1.0))


@dataclass
class DiagnosticRecord:
    t: float
    mass1: float
    mass2: float
    entropy: float
    abs_entropy: float
    second_moment: float
    dissipation: float
    neg_nlapW: float
    grad_W_sq: float
    gap_sq: float
    overlap: float
    linf_n: float
    h1_n: float

    def as_row(self) -> list[float]:
        return [getattr(self, f.name) for f in fields(self)]

    def as_dict(self) -> dict:
        return asdict(self)


def make_record(t: float, n1: Field, n2: Field, W: Field) -> DiagnosticRecord:
    n = n1 + n2
    return DiagnosticRecord(
        t=t,
        mass1=integrate(n1),
        mass2=integrate(n2),
        entropy=entropy(n),
        abs_entropy=abs_entropy(n),
        second_moment=second_moment(n),
        dissipation=dissipation(n, W),
        neg_nlapW=neg_n_lap_W(n, W),
        grad_W_sq=grad_sq(W),
        gap_sq=gap_sq(n, W),
        overlap=overlap(n1, n2),
        linf_n=n.max(),
        h1_n=h1_seminorm(n),
    )


def time_integral(times, values) -> float:
    """Trapezoid rule over output times."""
    return float(np.trapezoid(np.asarray(values, dtype=float), np.asarray(times, dtype=float)))


def entropy_inequality_residual(times, n1s, n2s, Ws, growth, model: str = "brinkman") -> float:
    """Discrete entropy balance over [times[0], times[-1]].

    Brinkman:  H(T) - H(0) - int int n Lap_h W - R
    Darcy:     H(T) - H(0) + int int |D+ n|^2 - R
    with R = int int log n [n1 G1(n) + n2 G2(n)]. Time integrals use the
    trapezoid rule on the supplied times. For Brinkman the continuous
    inequality predicts a non-positive value; for Darcy, zero.
    """
    totals = [a + b for a, b in zip(n1s, n2s)]
    R = time_integral(times, [reaction_entropy_rate(a, b, growth) for a, b in zip(n1s, n2s)])
    dH = entropy(totals[-1]) - entropy(totals[0])
    if model == "brinkman":
        D = time_integral(times, [neg_n_lap_W(n, W) for n, W in zip(totals, Ws)])
    elif model == "darcy":
        D = time_integral(times, [h1_seminorm(n) for n in totals])
    else:
        raise ValueError(f"unknown model {model!r}")
    return dH + D - R


# -- compactness modulus ----------------------------------------------------------

def compactness_kernel(x, h_param: float):
    """K_h(x) = 1{|x| <= 1/2} / (h + |x|)."""
    ax = np.abs(x)
    return np.where(ax <= 0.5, 1.0 / (h_param + ax), 0.0)


def compactness_kernel_checks(h_param: float, samples: int = 200001) -> dict:
    """Numerical check of the two kernel properties.

    Returns the ratio ||K_h||_1 / |log h| and max |x||K_h'(x)| / K_h(x) on the
    support (the constant C, which is 1 for this kernel).
    """
    x = np.linspace(-0.5, 0.5, samples)
    K = compactness_kernel(x, h_param)
    mass = float(np.trapezoid(K, x))
    dK = np.gradient(K, x)
    interior = np.abs(x) < 0.5 - 2 * (x[1] - x[0])
    ratio = float((np.abs(x) * np.abs(dK) / K)[interior].max())
    return {"mass_over_log": mass / abs(math.log(h_param)), "derivative_constant": ratio}


def compactness_modulus(f: Field, h_param: float, normalized: bool = True) -> float:
    """|log h|^-1 double integral of K_h(x - y) |f(x) - f(y)| (d=1, periodic distance)."""
    g = f.grid
    if g.dim != 1:
        raise ValueError("compactness modulus is implemented for d=1 only")
    if not 0 < h_param < 1:
        raise ValueError("h_param must lie in (0, 1)")
    N, h = g.N, g.h
    j = np.arange(N)
    dist = np.minimum(j, N - j) * h
    w = compactness_kernel(dist, h_param)
    v = f.values
    total = 0.0
    # only offsets inside the kernel support contribute
    for off in np.nonzero(w)[0]:
        total += w[off] * np.abs(v - np.roll(v, -off)).sum()
    Q = total * h * h
    return Q / abs(math.log(h_param)) if normalized else Q
