"""Agents, utility families, and the finite economy induced by a classification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .classification import Classification, refine_check, overlap_matrix
from .errors import ValidationError
from .measures import TOL, PiecewiseMeasure


@dataclass(frozen=True)
class Linear:
    evaluation: PiecewiseMeasure
    kind: str = field(default="linear", init=False)


@dataclass(frozen=True)
class CobbDouglas:
    evaluation: PiecewiseMeasure
    kind: str = field(default="cobb_douglas", init=False)


@dataclass(frozen=True)
class CES:
    evaluation: PiecewiseMeasure
    rho: float
    kind: str = field(default="ces", init=False)

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValidationError(f"CES exponent must lie in (0, 1), got {self.rho}")


UtilityKind = Union[Linear, CobbDouglas, CES]


@dataclass(frozen=True)
class Agent:
    claim: float
    utility: UtilityKind

    def __post_init__(self):
        if not self.claim > 0:
            raise ValidationError(f"claims must be positive, got {self.claim}")


class Economy:
    """Endowment measure ``omega`` (total mass 1) shared by agents whose claims sum to 1."""

    def __init__(self, omega: PiecewiseMeasure, agents: Sequence[Agent]):
        agents = list(agents)
        if not agents:
            raise ValidationError("an economy needs at least one agent")
        if abs(omega.total() - 1.0) > TOL:
            raise ValidationError(f"endowment must have total mass 1, got {omega.total()!r}")
        total = sum(a.claim for a in agents)
        if abs(total - 1.0) > TOL:
            raise ValidationError(f"claims must sum to 1, got {total!r}")
        self.omega = omega
        self.agents = agents

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def claims(self) -> np.ndarray:
        return np.array([a.claim for a in self.agents])

    @property
    def kinds(self) -> set[str]:
        return {a.utility.kind for a in self.agents}

    def evaluations(self) -> list[PiecewiseMeasure]:
        return [a.utility.evaluation for a in self.agents]

    def with_agents(self, agents: Sequence[Agent]) -> "Economy":
        return Economy(self.omega, agents)

    def to_dict(self) -> dict:
        out = []
        for a in self.agents:
            u = {"kind": a.utility.kind, "evaluation": a.utility.evaluation.to_dict()}
            if isinstance(a.utility, CES):
                u["rho"] = a.utility.rho
            out.append({"claim": a.claim, "utility": u})
        return {"omega": self.omega.to_dict(), "agents": out}

    @classmethod
    def from_dict(cls, data: dict) -> "Economy":
        try:
            omega = PiecewiseMeasure.from_dict(data["omega"])
            agents = []
            for entry in data["agents"]:
                u = entry["utility"]
                ev = PiecewiseMeasure.from_dict(u["evaluation"])
                kind = u["kind"]
                if kind == "linear":
                    util = Linear(ev)
                elif kind == "cobb_douglas":
                    util = CobbDouglas(ev)
                elif kind == "ces":
                    util = CES(ev, float(u["rho"]))
                else:
                    raise ValidationError(f"unknown utility kind {kind!r}")
                agents.append(Agent(float(entry["claim"]), util))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed economy: missing or invalid field {exc!r}") from exc
        return cls(omega, agents)


@dataclass
class CommodityEconomy:
    """The finite exchange economy over the cells of a classification.

    ``valuations[i, C]`` is agent ``i``'s evaluation of the whole cell
    ``C``; for Cobb-Douglas and CES agents these are the exponent weights.
    """

    classification: Classification
    supplies: np.ndarray
    claims: np.ndarray
    valuations: np.ndarray
    kinds: list[str]
    rhos: np.ndarray

    @property
    def n(self) -> int:
        return len(self.claims)

    @property
    def k(self) -> int:
        return len(self.supplies)

    @property
    def endowments(self) -> np.ndarray:
        return np.outer(self.claims, self.supplies)

    @property
    def kind(self) -> str:
        kinds = set(self.kinds)
        if len(kinds) != 1:
            raise ValidationError(f"mixed utility kinds {sorted(kinds)} are not supported")
        return kinds.pop()

    def with_claims(self, claims) -> "CommodityEconomy":
        claims = np.asarray(claims, dtype=float)
        if claims.shape != self.claims.shape or np.any(claims <= 0):
            raise ValidationError("claims must be positive, one per agent")
        if abs(claims.sum() - 1.0) > 1e-10:
            raise ValidationError(f"claims must sum to 1, got {claims.sum()!r}")
        return CommodityEconomy(
            self.classification, self.supplies, claims, self.valuations, self.kinds, self.rhos
        )

    def utility(self, i: int, bundle) -> float:
        x = np.asarray(bundle, dtype=float)
        if x.shape != (self.k,):
            raise ValidationError(f"bundle has {x.shape} entries, expected ({self.k},)")
        if np.any(x < -1e-12):
            raise ValidationError("bundles must be nonnegative")
        x = np.maximum(x, 0.0)
        y = x / self.supplies
        w = self.valuations[i]
        kind = self.kinds[i]
        if kind == "linear":
            return float(y @ w)
        if kind == "cobb_douglas":
            pos = w > 0
            if np.any(y[pos] <= 0):
                return 0.0
            return float(np.exp(np.sum(w[pos] * np.log(y[pos]))))
        rho = self.rhos[i]
        s = float(w @ y ** rho)
        return s ** (1.0 / rho) if s > 0 else 0.0

    def utilities(self, allocation) -> np.ndarray:
        allocation = np.asarray(allocation, dtype=float)
        if allocation.shape != (self.n, self.k):
            raise ValidationError(f"allocation shape {allocation.shape} != ({self.n}, {self.k})")
        return np.array([self.utility(i, allocation[i]) for i in range(self.n)])


def induce(e: Economy, pi: Classification) -> CommodityEconomy:
    """The economy E(pi): per-cell supplies and per-agent cell valuations."""
    supplies = pi.masses(e.omega)
    if np.any(supplies <= TOL):
        bad = [repr(c) for c, s in zip(pi.cells, supplies) if s <= TOL]
        raise ValidationError(f"cells with zero endowment are not allowed: {', '.join(bad)}")
    vals = np.array([pi.masses(ev) for ev in e.evaluations()])
    kinds = [a.utility.kind for a in e.agents]
    rhos = np.array([getattr(a.utility, "rho", np.nan) for a in e.agents])
    for i, kind in enumerate(kinds):
        if kind == "cobb_douglas" and abs(vals[i].sum() - 1.0) > 1e-9:
            warnings.warn(
                f"agent {i}: Cobb-Douglas exponents sum to {vals[i].sum():.6g}, not 1",
                stacklevel=2,
            )
    return CommodityEconomy(pi, supplies, e.claims, vals, kinds, rhos)


def utility(ce: CommodityEconomy, agent_index: int, bundle) -> float:
    return ce.utility(agent_index, bundle)


def map_bundle(pi: Classification, rho: Classification, bundle, omega: PiecewiseMeasure) -> np.ndarray:
    """Split each pi-quantity over the rho-cells inside it, proportionally to omega."""
    if not refine_check(rho, pi, omega):
        raise ValidationError(f"{rho} does not refine {pi}")
    x = np.asarray(bundle, dtype=float)
    if x.shape != (pi.k,):
        raise ValidationError(f"bundle has {x.shape} entries, expected ({pi.k},)")
    m = overlap_matrix(pi, rho, omega)
    share = m / m.sum(axis=1, keepdims=True)
    return x @ share


@dataclass
class Configuration:
    """A classification paired with an allocation (one row per agent)."""

    classification: Classification
    allocation: np.ndarray

    def __post_init__(self):
        self.allocation = np.atleast_2d(np.asarray(self.allocation, dtype=float))
        if self.allocation.shape[1] != self.classification.k:
            raise ValidationError(
                f"allocation has {self.allocation.shape[1]} columns for {self.classification.k} cells"
            )

    def check_feasible(self, e: Economy, tol: float = 1e-9) -> None:
        if self.allocation.shape[0] != e.n:
            raise ValidationError(f"allocation has {self.allocation.shape[0]} rows for {e.n} agents")
        if np.any(self.allocation < -tol):
            raise ValidationError("allocation has negative entries")
        supplies = self.classification.masses(e.omega)
        excess = self.allocation.sum(axis=0) - supplies
        if np.any(excess > tol):
            raise ValidationError(f"infeasible configuration: excess use {excess.max():.3g}")

    def utilities(self, e: Economy) -> np.ndarray:
        self.check_feasible(e)
        return induce(e, self.classification).utilities(self.allocation)
