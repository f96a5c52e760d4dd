"""Cobb-Douglas (closed form) and CES (tatonnement) equilibria."""

from __future__ import annotations

import numpy as np

from ..economy import CommodityEconomy
from ..errors import SolverError, ValidationError
from .equilibrium import Equilibrium, ces_demand, verify_equilibrium


def _require(ce: CommodityEconomy, kind: str):
    if any(k != kind for k in ce.kinds):
        raise ValidationError(f"every agent must have {kind} utility")


def solve_cobb_douglas(ce: CommodityEconomy) -> Equilibrium:
    """Each agent spends the share ``nu_i(C) / nu_i(I)`` of its claim on cell ``C``."""
    _require(ce, "cobb_douglas")
    totals = ce.valuations.sum(axis=1)
    if np.any(totals <= 0):
        raise ValidationError("every Cobb-Douglas agent needs a positive exponent total")
    spend = ce.claims[:, None] * ce.valuations / totals[:, None]
    revenue = spend.sum(axis=0)
    if np.any(revenue <= 0):
        j = int(np.argmin(revenue))
        raise ValidationError(
            f"cell {j} {ce.classification.cells[j]!r} draws no expenditure; its price would be zero"
        )
    prices = revenue / ce.supplies
    x = spend / prices
    eq = Equilibrium(prices, x, ce.utilities(x), 0)
    eq.residuals = verify_equilibrium(ce, eq, 1e-9).residuals
    return eq


def cobb_douglas_supporting_prices(ce: CommodityEconomy, allocation) -> np.ndarray:
    """Normalized prices proportional to agent 0's marginal utilities at an interior allocation.

    At a Pareto-optimal interior allocation every agent's marginal-rate
    vector is proportional to these prices.
    """
    _require(ce, "cobb_douglas")
    x = np.asarray(allocation, dtype=float)
    if np.any(x <= 0):
        raise ValidationError("supporting prices need an interior allocation")
    raw = ce.valuations[0] / x[0]
    return raw / (raw @ ce.supplies)


def solve_ces(
    ce: CommodityEconomy,
    max_iter: int = 200_000,
    tol: float = 1e-12,
) -> Equilibrium:
    """Multiplicative tatonnement on cell prices.

    Works in cell-value units ``q_C = p_C * omega(C)``; each step raises
    ``log q_C`` by ``step * log(demand_C / supply_C)`` with
    ``step = 1 / (2 * sigma_max)`` where ``sigma = 1 / (1 - rho)`` is the
    elasticity of substitution.  Gross substitutability makes this a
    contraction towards the unique normalized equilibrium.
    """
    _require(ce, "ces")
    if np.any(~(ce.valuations > 0).any(axis=0)):
        j = int(np.argmin((ce.valuations > 0).any(axis=0)))
        raise ValidationError(f"cell {j} is valued by no agent; its price would be zero")
    if np.any(ce.valuations.sum(axis=1) <= 0):
        raise ValidationError("every agent must value at least one cell")
    sigma = 1.0 / (1.0 - ce.rhos)
    step = 0.5 / sigma.max()
    q = ce.valuations.T @ ce.claims
    q = q / q.sum()
    excess = np.inf
    for it in range(1, max_iter + 1):
        prices = q / ce.supplies
        demand = ces_demand(ce, prices).sum(axis=0) / ce.supplies
        excess = np.max(np.abs(demand - 1.0))
        if excess < tol:
            break
        q = q * np.exp(step * np.log(demand))
        q = q / q.sum()
    prices = q / ce.supplies
    x = ces_demand(ce, prices)
    eq = Equilibrium(prices, x, ce.utilities(x), it)
    report = verify_equilibrium(ce, eq, 1e-9)
    eq.residuals = {**report.residuals, "excess_demand": float(excess)}
    if excess >= tol or not report.passed:
        raise SolverError(
            f"tatonnement stopped after {it} iterations with excess demand {excess:.3g}",
            residuals=eq.residuals,
            iterations=it,
        )
    return eq
