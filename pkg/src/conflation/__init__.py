"""Competitive markets in which a continuum of goods is traded through a finite classification.

Goods are points of ``[0, 1]``.  A classification cuts the interval into
cells, each cell becomes one tradable commodity, and the resulting finite
Fisher market is solved for linear, Cobb-Douglas or CES agents.
"""

from .classification import Classification, d_omega, overlap_matrix, random_perturbation, refine_check
from .economy import (
    CES,
    Agent,
    CobbDouglas,
    CommodityEconomy,
    Configuration,
    Economy,
    Linear,
    induce,
    map_bundle,
    utility,
)
from .errors import CapacityError, ConflationError, SolverError, ValidationError
from .measures import Interval, PiecewiseMeasure, measure_of, measure_of_union, svc_gaps, svc_intervals
from .solvers import (
    Equilibrium,
    redefine_claims,
    solve,
    solve_ces,
    solve_cobb_douglas,
    solve_linear,
    solve_opposed,
    verify_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "CES",
    "CapacityError",
    "Classification",
    "CobbDouglas",
    "CommodityEconomy",
    "Configuration",
    "ConflationError",
    "Economy",
    "Equilibrium",
    "Interval",
    "Linear",
    "PiecewiseMeasure",
    "SolverError",
    "ValidationError",
    "d_omega",
    "induce",
    "map_bundle",
    "measure_of",
    "measure_of_union",
    "overlap_matrix",
    "random_perturbation",
    "redefine_claims",
    "refine_check",
    "solve",
    "solve_ces",
    "solve_cobb_douglas",
    "solve_linear",
    "solve_opposed",
    "svc_gaps",
    "svc_intervals",
    "utility",
    "verify_equilibrium",
]
