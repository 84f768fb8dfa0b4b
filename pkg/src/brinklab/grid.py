"""
Uniform periodic grids, cell-averaged fields and discrete calculus.

The box is [-L, L)^dim with N cells per dimension. Values are cell averages,
so ``integrate`` is exact and every flux-form update telescopes.

Face arrays follow one convention throughout the package: entry ``i`` along
axis ``k`` holds the value on the face between cell ``i`` and cell ``i+1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Grid:
    dim: int
    L: float
    N: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.N < 8:
            raise ValueError(f"need at least 8 cells per dimension, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"half width must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @cached_property
    def centers(self) -> np.ndarray:
        """1D array of cell-center coordinates along one axis."""
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.centers] * self.dim), indexing="ij"))

    @cached_property
    def radius_sq(self) -> np.ndarray:
        return sum(c**2 for c in self.coords)

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape))

    def from_function(self, func) -> "Field":
        """Sample ``func(*coords)`` at cell centers."""
        return Field(self, np.asarray(func(*self.coords), dtype=float))

    def refine(self) -> "Grid":
        return Grid(self.dim, self.L, 2 * self.N)


class GridMismatchError(ValueError):
    pass


@dataclass(eq=False)
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("field contains non-finite values")
        self.values = values

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def _other(self, other):
        if isinstance(other, Field):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())


def check_same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def integrate(f: Field) -> float:
    return float(f.grid.cell_volume * f.values.sum())


def gradient(f: Field) -> list[Field]:
    """Central-difference gradient at cell centers, periodic."""
    h = f.grid.h
    return [
        Field(f.grid, (np.roll(f.values, -1, axis=k) - np.roll(f.values, 1, axis=k)) / (2 * h))
        for k in range(f.grid.dim)
    ]


def face_gradient(values: np.ndarray, h: float) -> list[np.ndarray]:
    """Forward differences (u[i+1] - u[i]) / h, one face array per axis."""
    return [(np.roll(values, -1, axis=k) - values) / h for k in range(values.ndim)]


def divergence_flux(fluxes, grid: Grid) -> Field:
    """Conservative divergence of face fluxes.

    ``fluxes[k][i]`` is the flux through the face between cells i and i+1
    along axis k. The result integrates to zero up to rounding.
    """
    if len(fluxes) != grid.dim:
        raise ValueError(f"expected {grid.dim} flux arrays, got {len(fluxes)}")
    out = np.zeros(grid.shape)
    for k, F in enumerate(fluxes):
        F = np.asarray(F, dtype=float).reshape(grid.shape)
        out += F - np.roll(F, 1, axis=k)
    return Field(grid, out / grid.h)


def laplacian_values(values: np.ndarray, h: float) -> np.ndarray:
    out = -2.0 * values.ndim * values
    for k in range(values.ndim):
        out = out + np.roll(values, 1, axis=k) + np.roll(values, -1, axis=k)
    return out / h**2


def laplacian(f: Field) -> Field:
    """3-point (d=1) or 5-point (d=2) periodic Laplacian."""
    return Field(f.grid, laplacian_values(f.values, f.grid.h))


def laplacian_symbol(grid: Grid) -> np.ndarray:
    """Eigenvalues of ``-laplacian`` on the rfftn frequency lattice (all >= 0)."""
    N, h = grid.N, grid.h
    full = 4.0 / h**2 * np.sin(np.pi * np.fft.fftfreq(N)) ** 2
    half = 4.0 / h**2 * np.sin(np.pi * np.fft.rfftfreq(N)) ** 2
    if grid.dim == 1:
        return half
    return full[:, None] + half[None, :]


def restrict(f: Field) -> Field:
    """Average 2^dim children onto the next coarser nested grid."""
    g = f.grid
    if g.N % 2:
        raise ValueError("cannot restrict a grid with an odd cell count")
    coarse = Grid(g.dim, g.L, g.N // 2)
    v = f.values
    if g.dim == 1:
        return Field(coarse, 0.5 * (v[0::2] + v[1::2]))
    return Field(coarse, 0.25 * (v[0::2, 0::2] + v[1::2, 0::2] + v[0::2, 1::2] + v[1::2, 1::2]))


# -- snapshot files -----------------------------------------------------------

def write_field(path, f: Field, t: float, name: str) -> Path:
    """Write ``dim N L t name`` header line followed by little-endian float64 data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if any(c.isspace() for c in name):
        raise ValueError(f"field name may not contain whitespace: {name!r}")
    header = f"{f.grid.dim} {f.grid.N} {float(f.grid.L)!r} {float(t)!r} {name}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())
    return path


def read_field(path) -> tuple[Field, float, str]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        data = fh.read()
    if len(header) != 5:
        raise ValueError(f"malformed snapshot header in {path}")
    dim, N, L, t, name = int(header[0]), int(header[1]), float(header[2]), float(header[3]), header[4]
    grid = Grid(dim, L, N)
    values = np.frombuffer(data, dtype="<f8")
    if values.size != N**dim:
        raise ValueError(f"{path}: expected {N**dim} values, found {values.size}")
    return Field(grid, values.reshape(grid.shape).copy()), t, name


def snapshot_path(run_dir, name: str, step: int) -> Path:
    return Path(run_dir) / f"{name}_{step:06d}.fld"
