"""Initial-data specifications: Gaussian bumps, mollified indicators, files."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .grid import Field, Grid, integrate, read_field

log = logging.getLogger(__name__)


def _center(c, dim):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size == 1:
        c = np.repeat(c, dim)
    if c.size != dim:
        raise ValueError(f"center {c} does not match dim={dim}")
    return c


@dataclass(frozen=True)
class Gaussian:
    """Isotropic Gaussian with total mass ``mass`` and standard deviation ``width``."""
    center: float | tuple = 0.0
    width: float = 1.0
    mass: float = 1.0

    def build(self, grid: Grid) -> Field:
        c = _center(self.center, grid.dim)
        r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
        norm = (2 * math.pi * self.width**2) ** (grid.dim / 2)
        return Field(grid, self.mass * np.exp(-r2 / (2 * self.width**2)) / norm)


@dataclass(frozen=True)
class Indicator:
    """``height`` on the box |x - center|_inf <= half_width, edges smoothed over two cells."""
    center: float | tuple = 0.0
    half_width: float = 1.0
    height: float = 1.0

    def build(self, grid: Grid) -> Field:
        c = _center(self.center, grid.dim)
        eps = 2 * grid.h
        prof = np.ones(grid.shape)
        for x, ci in zip(grid.coords, c):
            d = np.abs(x - ci) - self.half_width
            prof = prof * 0.5 * (1.0 - erf(d / eps))
        return Field(grid, self.height * prof)


@dataclass(frozen=True)
class FromFile:
    path: str

    def build(self, grid: Grid) -> Field:
        f, _, _ = read_field(self.path)
        if f.grid != grid:
            raise ValueError(f"{self.path}: snapshot grid {f.grid} does not match run grid {grid}")
        return f


@dataclass(frozen=True)
class Zero:
    def build(self, grid: Grid) -> Field:
        return grid.zeros()


def build_sum(specs, grid: Grid) -> Field:
    """A species may be a single spec or a list of specs that are summed."""
    if isinstance(specs, (list, tuple)):
        out = grid.zeros()
        for s in specs:
            out = out + s.build(grid)
        return out
    return specs.build(grid)


def boundary_mass_fraction(f: Field, band: float = 0.05) -> float:
    """Fraction of the mass sitting in the outer ``band`` of the box."""
    g = f.grid
    m = integrate(f)
    if m == 0:
        return 0.0
    inner = np.ones(g.shape, dtype=bool)
    for x in g.coords:
        inner &= np.abs(x) < (1 - band) * g.L
    return float(g.cell_volume * np.abs(f.values[~inner]).sum() / abs(m))


def check_truncation(f: Field, threshold: float = 1e-6, what: str = "density") -> bool:
    frac = boundary_mass_fraction(f)
    if frac > threshold:
        log.warning("%s: %.2e of the mass lies near the box edge; enlarge L", what, frac)
        return False
    return True
