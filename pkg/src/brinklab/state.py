"""Species state, run results and the run-time error types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import DiagnosticRecord
from .grid import Field, Grid


class StabilityError(ValueError):
    """Requested time step exceeds the stability guard."""


class BlowUpError(RuntimeError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"run aborted at step {step}: {reason}")
        self.step = step
        self.reason = reason


@dataclass
class SpeciesState:
    n1: Field
    n2: Field
    t: float = 0.0

    @property
    def total(self) -> Field:
        return self.n1 + self.n2

    @property
    def grid(self) -> Grid:
        return self.n1.grid


@dataclass
class RunResult:
    model: str
    grid: Grid
    growth: tuple
    params: dict
    times: list[float] = field(default_factory=list)
    states: list[SpeciesState] = field(default_factory=list)
    potentials: list[Field] = field(default_factory=list)
    records: list[DiagnosticRecord] = field(default_factory=list)
    n_steps: int = 0
    max_elliptic_residual: float = 0.0
    max_ceiling_ratio: float = 0.0
    entropy_bound_violations: int = 0
    # per-step history, filled when the config asks for it (frozen-coefficient replays)
    step_dts: list[float] = field(default_factory=list)
    step_totals: list[np.ndarray] = field(default_factory=list)

    @property
    def final(self) -> SpeciesState:
        return self.states[-1]

    def totals(self) -> list[Field]:
        return [s.total for s in self.states]
