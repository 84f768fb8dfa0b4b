"""
Brinkman elliptic law  -nu * Lap W + W = n.

Two independent routes are provided:

* ``solve_helmholtz``: FFT division by the exact symbol of the discrete
  Laplacian, so the discrete residual is at rounding level.
* ``convolve_kernel``: direct O(N^2) summation against a periodized kernel
  (d=1 only). ``kernel="continuous"`` integrates the exponential fundamental
  solution exactly over each cell; ``kernel="lattice"`` uses the closed-form
  Green's function of the 3-point operator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Field, Grid, laplacian_symbol, laplacian_values

log = logging.getLogger(__name__)

# image sums stop once the next image contributes less than this
IMAGE_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class BrinkmanParams:
    nu: float

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"viscosity must be positive and finite, got {self.nu}")


def _params(p) -> BrinkmanParams:
    return p if isinstance(p, BrinkmanParams) else BrinkmanParams(float(p))


@lru_cache(maxsize=64)
def _helmholtz_symbol(grid: Grid, nu: float) -> np.ndarray:
    return 1.0 + nu * laplacian_symbol(grid)


def solve_helmholtz(n: Field, p) -> Field:
    """Solve ``-nu Lap_h W + W = n`` on the periodic grid."""
    p = _params(p)
    values = n.values
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite density passed to the elliptic solve")
    lo = values.min()
    if lo < 0 and lo < -1e-12 * max(np.abs(values).max(), 1.0):
        log.warning("elliptic solve: density has negative entries (min %.3e)", lo)
    sym = _helmholtz_symbol(n.grid, p.nu)
    axes = tuple(range(n.grid.dim))
    W = np.fft.irfftn(np.fft.rfftn(values, axes=axes) / sym, s=n.grid.shape, axes=axes)
    return Field(n.grid, W)


def helmholtz_residual(W: Field, n: Field, p) -> float:
    """Max-norm of ``-nu Lap_h W + W - n``."""
    p = _params(p)
    r = -p.nu * laplacian_values(W.values, W.grid.h) + W.values - n.values
    return float(np.abs(r).max())


def fundamental_kernel_1d(p, x):
    """K(x) = exp(-|x|/sqrt(nu)) / (2 sqrt(nu)), the 1D fundamental solution."""
    p = _params(p)
    s = math.sqrt(p.nu)
    return np.exp(-np.abs(x) / s) / (2.0 * s)


def _kernel_primitive(x, s):
    # antiderivative of K vanishing at 0
    return np.sign(x) * 0.5 * (1.0 - np.exp(-np.abs(x) / s))


def periodized_kernel_weights(grid: Grid, p) -> np.ndarray:
    """Cell integrals of the periodized K over cell j, for offsets j = 0..N-1.

    ``w[j]`` integrates K over [j*h - h/2, j*h + h/2] plus all periodic images,
    so ``sum(w) == 1`` up to the truncated tail.
    """
    if grid.dim != 1:
        raise ValueError("kernel convolution is implemented for d=1 only")
    p = _params(p)
    s = math.sqrt(p.nu)
    period = 2.0 * grid.L
    offsets = np.arange(grid.N) * grid.h
    offsets = np.where(offsets >= grid.L, offsets - period, offsets)
    w = np.zeros(grid.N)
    m = 0
    while True:
        shifts = [0.0] if m == 0 else [m * period, -m * period]
        for shift in shifts:
            d = offsets + shift
            w += _kernel_primitive(d + grid.h / 2, s) - _kernel_primitive(d - grid.h / 2, s)
        m += 1
        nearest = m * period - grid.L - grid.h
        if np.exp(-max(nearest, 0.0) / s) < IMAGE_TAIL_TOL:
            break
    return w


def lattice_kernel_weights(grid: Grid, p) -> np.ndarray:
    """Periodic Green's function of ``I - nu Lap_h`` (3-point), times h.

    Off the origin the free-space lattice solution is A r^|j| with
    r + 1/r = 2 + h^2/nu; the periodic image sum is geometric and summed in
    closed form.
    """
    if grid.dim != 1:
        raise ValueError("kernel convolution is implemented for d=1 only")
    p = _params(p)
    h, N = grid.h, grid.N
    b = h * h / p.nu
    # smaller root of r^2 - (2 + b) r + 1 = 0, written to avoid cancellation
    r = 2.0 / (2.0 + b + math.sqrt(b * (4.0 + b)))
    A = 1.0 / (1.0 + 2.0 * (1.0 - r) / b)
    j = np.arange(N)
    rN = r**N
    return A * (r**j + r ** (N - j)) / (1.0 - rN)


def convolve_kernel(n: Field, p, kernel: str = "continuous") -> Field:
    """Periodized convolution ``W = K * n`` by direct summation (d=1)."""
    if n.grid.dim != 1:
        raise ValueError(f"convolve_kernel supports d=1 only, got d={n.grid.dim}")
    if kernel == "continuous":
        w = periodized_kernel_weights(n.grid, p)
    elif kernel == "lattice":
        w = lattice_kernel_weights(n.grid, p)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    N = n.grid.N
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return Field(n.grid, w[idx] @ n.values)
