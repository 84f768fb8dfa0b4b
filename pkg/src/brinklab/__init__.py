"""
Two-species tissue growth under the Brinkman pressure law, its regularized
variant and the Darcy limit, on periodic finite-volume grids.
"""

from .brinkman import BrinkmanRunConfig, run, step, stable_dt
from .darcy import DarcyRunConfig, darcy_run, barenblatt_exact
from .grid import Field, Grid, integrate
from .growth import GrowthLaw, make_linear_logistic, validate_growth, zero_growth
from .kernels import BrinkmanParams, solve_helmholtz
from .state import BlowUpError, RunResult, SpeciesState, StabilityError

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "BrinkmanParams", "BrinkmanRunConfig", "DarcyRunConfig", "Field", "Grid", "GrowthLaw",
    "RunResult", "SpeciesState", "StabilityError", "barenblatt_exact", "darcy_run", "integrate",
    "make_linear_logistic", "run", "solve_helmholtz", "stable_dt", "step", "validate_growth", "zero_growth",
]
