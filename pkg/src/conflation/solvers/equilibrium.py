"""Equilibrium records, certificate checks, and claim redefinition."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..economy import CommodityEconomy
from ..errors import ValidationError


@dataclass
class Equilibrium:
    prices: np.ndarray
    allocation: np.ndarray
    utilities: np.ndarray
    iterations: int = 0
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "prices": self.prices.tolist(),
            "allocation": self.allocation.tolist(),
            "utilities": self.utilities.tolist(),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "iterations": int(self.iterations),
        }


@dataclass
class VerificationReport:
    passed: bool
    residuals: dict
    failures: list

    def __bool__(self):
        return self.passed


def ces_demand(ce: CommodityEconomy, prices, claims=None) -> np.ndarray:
    """CES demand of every agent at ``prices`` with wealth equal to the claims."""
    prices = np.asarray(prices, dtype=float)
    claims = ce.claims if claims is None else claims
    q = prices * ce.supplies
    out = np.zeros((ce.n, ce.k))
    for i in range(ce.n):
        sigma = 1.0 / (1.0 - ce.rhos[i])
        a = ce.valuations[i]
        pos = a > 0
        r = np.zeros(ce.k)
        # (a/q)^sigma computed in logs to keep extreme exponents finite
        logr = sigma * (np.log(a[pos]) - np.log(q[pos]))
        r[pos] = np.exp(logr - logr.max())
        y = claims[i] * r / (q @ r)
        out[i] = y * ce.supplies
    return out


def verify_equilibrium(ce: CommodityEconomy, eq: Equilibrium, tol: float = 1e-7) -> VerificationReport:
    """Check normalization, budgets, market clearing, and the family's optimality certificate."""
    p = np.asarray(eq.prices, dtype=float)
    x = np.asarray(eq.allocation, dtype=float)
    if p.shape != (ce.k,) or x.shape != (ce.n, ce.k):
        raise ValidationError("equilibrium arity does not match the economy")
    res = {}
    failures = []

    res["normalization"] = abs(p @ ce.supplies - 1.0)
    res["negativity"] = max(0.0, -min(p.min(), x.min()))
    spend = x @ p
    res["budget"] = float(np.max(np.abs(spend - ce.claims)))
    clear = np.abs(x.sum(axis=0) - ce.supplies) / ce.supplies
    res["clearing"] = float(np.max(np.where(p > 0, clear, 0.0)))
    over = (x.sum(axis=0) - ce.supplies) / ce.supplies
    res["feasibility"] = float(max(0.0, over.max()))

    kind = ce.kind
    if kind == "linear":
        v = ce.valuations / ce.supplies
        if np.any((p <= 0) & (v > 0).any(axis=0)):
            # a valued good at price zero: every holder of it can do better
            res["bang_per_buck"] = float("inf")
        else:
            bpb = v / np.where(p > 0, p, 1.0) * (p > 0)
            best = bpb.max(axis=1, keepdims=True)
            # free cells are worthless to everyone (checked above), so holding them is harmless
            used = (x > tol * ce.supplies) & (p > 0)
            gap = np.where(used, (best - bpb) / np.where(best > 0, best, 1.0), 0.0)
            res["bang_per_buck"] = float(gap.max())
    elif kind == "cobb_douglas":
        shares = (x * p) / ce.claims[:, None]
        target = ce.valuations / ce.valuations.sum(axis=1, keepdims=True)
        res["expenditure_shares"] = float(np.max(np.abs(shares - target)))
    else:
        if np.any(p <= 0):
            res["ces_demand"] = float("inf")
        else:
            d = ces_demand(ce, p)
            res["ces_demand"] = float(np.max(np.abs(d - x) / ce.supplies))

    for name, value in res.items():
        if not value <= tol:
            failures.append(f"{name} residual {value:.3g} exceeds {tol:.3g}")
    return VerificationReport(not failures, res, failures)


def redefine_claims(ce: CommodityEconomy, allocation, prices) -> np.ndarray:
    """Claims that make ``allocation`` affordable exactly at ``prices``.

    Each agent's new claim is the value of their bundle divided by the
    value of the whole endowment.
    """
    x = np.asarray(allocation, dtype=float)
    p = np.asarray(prices, dtype=float)
    if x.shape != (ce.n, ce.k) or p.shape != (ce.k,):
        raise ValidationError("allocation/prices arity does not match the economy")
    if np.any(x <= 0):
        raise ValidationError("claim redefinition needs an interior allocation (every x > 0)")
    if np.any(p <= 0):
        raise ValidationError("prices must be positive")
    claims = (x @ p) / (p @ ce.supplies)
    if abs(claims.sum() - 1.0) > 1e-9:
        raise ValidationError(
            f"allocation does not exhaust the endowment; claims sum to {claims.sum():.12g}"
        )
    return claims
