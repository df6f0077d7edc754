"""Numerical laboratory for -Δu = λ f(u) with λ < 0.

Minimal-solution solver with continuation, boundary blow-up solutions,
entire radial profiles, the Keller-Osserman test and the rescaling checks
that compare deep-λ solutions with their limit profiles.
"""

from .asymptotics import (EnergyRecord, FrameError, LimitProfile, RescaleFrame, energy, frame_for,
                          robin_check_disk, verify_limit)
from .domain import (Domain, DomainError, Grid2D, Interval, RadialBall, SolutionField, discrete_laplacian,
                     disk2d, square2d, torsion)
from .homogeneity import HomogeneityError, HomogeneityTable, extract_g0, homogeneity_limit
from .keller import KellerOssermanError, KOResult, keller_osserman
from .large import (BlowupSolution, EntireProfile, LargeSolutionError, boundary_growth_probe, bounded_solve,
                    large_solve, shoot_entire)
from .nonlinearity import LimitNonlinearity, Nonlinearity, NonlinearityError, catalog
from .solver import (BranchRecord, ConvergenceError, SolveConfig, compare_fields, residual_lambda_f,
                     solve_minimal, stability_eigenvalue, sweep_branch)

__version__ = "0.1.0"
