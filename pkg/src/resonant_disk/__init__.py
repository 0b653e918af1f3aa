"""Radial homotopy-continuation solver for -Lap u = lambda1 u + e^u + f on the unit disk."""

__version__ = "0.1.0"

from .continuation import (ContinuationConfig, ContinuationTrace, HomotopyState, Verdict,
                           run_continuation, scan_threshold)
from .eigen import EigenPair, first_eigenpair, morse_index, radial_gap
from .forcing import FOUR_PI, ForcingSpec, build_forcing, mass
from .grid import RadialGrid, inner, integrate_disk, make_grid
from .laplacian import RadialLaplacian, apply, assemble_laplacian, solve_shifted
from .nonlinear import ProblemData, jacobian, make_problem, newton_solve, residual

__all__ = [
    "ContinuationConfig", "ContinuationTrace", "EigenPair", "FOUR_PI", "ForcingSpec",
    "HomotopyState", "ProblemData", "RadialGrid", "RadialLaplacian", "Verdict", "apply",
    "assemble_laplacian", "build_forcing", "first_eigenpair", "inner", "integrate_disk",
    "jacobian", "make_grid", "make_problem", "mass", "morse_index", "newton_solve",
    "radial_gap", "residual", "run_continuation", "scan_threshold", "solve_shifted",
]
