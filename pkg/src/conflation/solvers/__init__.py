"""Equilibrium solvers for economies induced by a classification."""

from ..economy import CommodityEconomy
from .equilibrium import (
    Equilibrium,
    VerificationReport,
    ces_demand,
    redefine_claims,
    verify_equilibrium,
)
from .linear import solve_linear
from .opposed import OpposedReport, leveling_point, opposed_derivative, solve_opposed
from .smooth import cobb_douglas_supporting_prices, solve_ces, solve_cobb_douglas

_DISPATCH = {
    "linear": solve_linear,
    "cobb_douglas": solve_cobb_douglas,
    "ces": solve_ces,
}


def solve(ce: CommodityEconomy) -> Equilibrium:
    """Dispatch on the (single) utility family of the economy."""
    return _DISPATCH[ce.kind](ce)


__all__ = [
    "Equilibrium",
    "OpposedReport",
    "VerificationReport",
    "ces_demand",
    "cobb_douglas_supporting_prices",
    "leveling_point",
    "opposed_derivative",
    "redefine_claims",
    "solve",
    "solve_ces",
    "solve_cobb_douglas",
    "solve_linear",
    "solve_opposed",
    "verify_equilibrium",
]
