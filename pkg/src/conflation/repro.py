"""Worked-example scenarios, each comparing computed quantities against reference values.

A scenario builds its economies through the public modules only, solves
them and returns a list of :class:`Check` records.  The ``basis`` of a
check says where its expected value comes from:

``published``    a number stated in the worked example
``closed form``  a formula evaluated independently of the solvers
``construction`` a property guaranteed by how the instance is built
``sanity``       a trivial consistency requirement
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import catalog
from .analysis import (
    aligned_grid,
    cobb_douglas_weighted_optimum,
    competitive_configuration,
    optimal_k,
    pareto_dominates,
    price_ratio_sweep,
    social_welfare,
    svc_improvement_demo,
    utility_sweep,
)
from .classification import Classification
from .economy import Configuration, induce
from .errors import ValidationError
from .solvers import (
    Equilibrium,
    cobb_douglas_supporting_prices,
    opposed_derivative,
    redefine_claims,
    solve,
    solve_linear,
    solve_opposed,
    verify_equilibrium,
)


@dataclass
class Check:
    quantity: str
    expected: object
    observed: object
    tolerance: float | None
    basis: str
    passed: bool
    residual: float | None = None


def close(quantity, expected, observed, tol, basis) -> Check:
    """Elementwise ``|observed - expected| <= tol``."""
    exp = np.asarray(expected, dtype=float)
    obs = np.asarray(observed, dtype=float)
    res = float(np.max(np.abs(obs - exp))) if obs.size else 0.0
    return Check(quantity, _plain(exp), _plain(obs), tol, basis, bool(res <= tol), res)


def holds(quantity, condition, basis, observed=None, expected=True) -> Check:
    return Check(quantity, _plain(expected), _plain(observed), None, basis, bool(condition))


def _plain(v):
    if isinstance(v, np.ndarray):
        return [float(x) for x in v.ravel()] if v.ndim else float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class ScenarioReport:
    id: str
    description: str
    checks: list
    elapsed: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "passed": self.passed,
            "elapsed_s": round(self.elapsed, 3),
            "note": self.note,
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str
    run: Callable[[], list]
    note: str = ""


def _solve(e, cuts) -> Equilibrium:
    return solve(induce(e, Classification(cuts)))


# -- scenarios ---------------------------------------------------------------


def _pareto_1():
    e = catalog.pareto_one()
    pi, rho = Classification([0, 0.5, 1]), Classification([0, 1 / 3, 1])
    cfg_pi, eq_pi = competitive_configuration(e, pi)
    cfg_rho, eq_rho = competitive_configuration(e, rho)
    return [
        close("utilities under {[0,1/2), [1/2,1]}", [2 / 3, 1 / 3, 1 / 3], eq_pi.utilities, 1e-7, "published"),
        close("utilities under {[0,1/3), [1/3,1]}", [1, 0.5, 0.5], eq_rho.utilities, 1e-7, "published"),
        close("welfare under the coarse split", 4 / 3, social_welfare(e, cfg_pi), 1e-7, "published"),
        close("welfare under the fine split", 2.0, social_welfare(e, cfg_rho), 1e-7, "published"),
        holds("finer configuration Pareto-dominates", pareto_dominates(e, cfg_rho, cfg_pi), "published", True),
        holds("no reverse dominance", not pareto_dominates(e, cfg_pi, cfg_rho), "sanity", True),
    ]


RS_GRID = 199


def _relative_scarcity():
    e = catalog.relative_scarcity()
    grid = aligned_grid(RS_GRID, [1 / 6, 1 / 2, 5 / 6])
    sweep = price_ratio_sweep(e, catalog.relative_scarcity_family, 0, 3, grid)
    phi = np.array([catalog.relative_scarcity_ratio(t) for t in grid])
    mirrored = np.array([catalog.relative_scarcity_ratio(1 - t) for t in grid])
    ratio = sweep.price_ratio
    recip = max(float(np.min(np.abs(r - 1 / ratio))) for r in ratio)
    u = sweep.utilities
    return [
        holds("every grid point solved", not sweep.failures, "sanity", sorted(sweep.failures)),
        close("price ratio p(A)/p(D) vs four-branch formula", phi, ratio, 1e-5, "closed form"),
        close("minimum price ratio", 2 / 3, np.min(ratio), 2e-3, "published"),
        close("maximum price ratio", 1.5, np.max(ratio), 2e-3, "published"),
        close("worst reciprocity gap min_s |phi(t) - 1/phi(s)|", 0.0, recip, 2e-3, "published"),
        close("utility ratio u1/u2 vs phi(1 - t)", mirrored, u[:, 0] / u[:, 1], 1e-5, "closed form"),
    ]


OPPOSED_GRID = np.arange(1, 100) / 100


def _opposed_eta():
    e = catalog.opposed_linear()
    sweep = utility_sweep(e, catalog.threshold_family, OPPOSED_GRID)
    table = np.array([catalog.opposed_utilities(t) for t in OPPOSED_GRID])
    closed = np.array([solve_opposed(e, catalog.threshold_family(t)).utilities for t in OPPOSED_GRID])
    step = OPPOSED_GRID[1] - OPPOSED_GRID[0]
    return [
        close("V1*(eta) vs three-branch table", table[:, 0], sweep.utilities[:, 0], 1e-6, "published"),
        close("V2*(eta) vs three-branch table", table[:, 1], sweep.utilities[:, 1], 1e-6, "published"),
        close("closed-form split vs market solver", closed, sweep.utilities, 1e-6, "closed form"),
        close("welfare argmax", 0.5, sweep.argmax_welfare, step + 1e-12, "published"),
    ]


OPPOSED_REGIMES = {
    "agent 1 gets none of the disputed cell": [0.0, 0.45, 0.9, 1.0],
    "disputed cell shared": [0.0, 0.45, 0.55, 1.0],
    "agent 1 gets all of the disputed cell": [0.0, 0.1, 0.55, 1.0],
}


def _fd_left_end(e, cuts, j, h=1e-4):
    def v1(c):
        cs = list(cuts)
        cs[j] = c
        return solve_linear(induce(e, Classification(cs))).utilities[0]

    return (v1(cuts[j] + h) - v1(cuts[j] - h)) / (2 * h)


def _opposed_derivative():
    e = catalog.opposed_linear()
    checks = []
    for label, cuts in OPPOSED_REGIMES.items():
        pi = Classification(cuts)
        rep = solve_opposed(e, pi)
        d = opposed_derivative(e, pi)
        fd = _fd_left_end(e, cuts, rep.disputed_index)
        checks.append(close(f"dV1/dtheta1, {label} (xi={rep.xi:.4g})", fd, d, 1e-4, "closed form"))
    return checks


def _position_switch():
    e = catalog.position_switch()
    eq_pi = _solve(e, [0, 1 / 3, 2 / 3, 1])
    eq_rho = _solve(e, [0, 1 / 3, 2 / 3, 5 / 6, 1])
    p = eq_rho.prices
    return [
        close("agent 1 bundle under thirds", [1 / 3, 0, 0], eq_pi.allocation[0], 1e-7, "published"),
        close("agent 1 bundle after splitting the last third", [0, 1 / 3, 0, 0], eq_rho.allocation[0], 1e-7, "published"),
        close("refined prices all equal", 0.0, np.max(p) - np.min(p), 1e-7, "published"),
        close("agent 1 utility unchanged", eq_pi.utilities[0], eq_rho.utilities[0], 1e-7, "published"),
    ]


UW_A_SPLITS = (0.1, 0.25, 0.4)
UW_B_SPLITS = (0.6, 0.75, 0.9)


def _welfare_refinement():
    e = catalog.welfare_refinement(2)
    base = _solve(e, [0, 0.5, 1]).utilities.sum()
    checks = [close("welfare under {A, B}", 1.5, base, 1e-8, "closed form")]
    for t in UW_A_SPLITS:
        sw = _solve(e, [0, t, 0.5, 1]).utilities.sum()
        checks.append(close(f"welfare after splitting A at {t}", base, sw, 1e-8, "published"))
    for t in UW_B_SPLITS:
        sw = _solve(e, [0, 0.5, t, 1]).utilities.sum()
        checks.append(holds(f"welfare drop after splitting B at {t} exceeds 1e-4",
                            base - sw > 1e-4, "published", base - sw, "> 1e-4"))
    return checks


def _optimal_k():
    checks = []
    for m in (2, 3):
        c = 1 / (m + 1)
        t0 = time.perf_counter()
        res = optimal_k(catalog.optimal_k_example(m), c)
        dt = time.perf_counter() - t0
        checks.append(close(f"k* for m={m}, c=1/{m + 1}", m * m, res.k_star, 0, "published"))
        checks.append(close(f"k bar for m={m}", m * m, res.k_bar, 1e-9, "published"))
        checks.append(holds(f"DP runtime for m={m} under 10 s", dt < 10, "sanity", dt))
    for c in (0.1, 0.5):
        res = optimal_k(catalog.identical_agents(3), c)
        checks.append(close(f"k* for identical agents, c={c}", 1, res.k_star, 0, "published"))
    return checks


def _second_welfare():
    e = catalog.cobb_douglas_pair([0.7, 0.3], [0.2, 0.8])
    ce = induce(e, Classification([0, 0.5, 1]))
    x = cobb_douglas_weighted_optimum(ce, [0.35, 0.65])
    p = cobb_douglas_supporting_prices(ce, x)
    claims = redefine_claims(ce, x, p)
    moved = ce.with_claims(claims)
    eq = Equilibrium(p, x, moved.utilities(x))
    report = verify_equilibrium(moved, eq, 1e-6)
    return [
        close("redefined claims sum to 1", 1.0, claims.sum(), 1e-10, "construction"),
        holds("Pareto point is an equilibrium under the new claims", report.passed, "published",
              report.residuals),
    ]


def _svc_pathology():
    e = catalog.svc_economy(2)
    cfg = Configuration(Classification.trivial(), np.array([[0.5], [0.5]]))
    rho, improved = svc_improvement_demo(2, cfg)
    before, after = cfg.utilities(e), improved.utilities(e)
    return [
        close("agent 1 utility unchanged", before[0], after[0], 1e-12, "published"),
        holds("agent 2 strictly better", after[1] > before[1], "published", after[1] - before[1], "> 0"),
        holds("refinement of the trivial classification", rho.k > 1, "sanity", rho.to_list()),
    ]


def _appendix_pareto_refinement():
    e = catalog.pareto_refinement()
    cfg, eq = competitive_configuration(e, Classification([0, 0.5, 1]))
    checks = []
    for t in (0.1, 0.25, 0.4):
        u3 = _solve(e, [0, t, 0.5, 1]).utilities[2]
        checks.append(holds(f"agent 3 worse after splitting A at {t}", u3 < eq.utilities[2] - 1e-9,
                            "published", u3, f"< {eq.utilities[2]:.12g}"))
    fine, eq_fine = competitive_configuration(e, catalog.eps_classification(0.05))
    gain = eq_fine.utilities - eq.utilities
    checks.append(holds("four-cell classification (eps=0.05) better for everyone",
                        bool(np.all(gain > 1e-9)), "published", gain, "all > 0"))
    checks.append(holds("four-cell configuration Pareto-dominates", pareto_dominates(e, fine, cfg),
                        "published", True))
    return checks


def _appendix_dirac():
    e = catalog.dirac_economy()
    base = _solve(e, catalog.dirac_cells().to_list()).utilities.sum()
    checks = []
    for t in (0.25, 0.5, 0.75):
        sw = _solve(e, [0, t, 1, 1]).utilities.sum()
        checks.append(holds(f"welfare lower after splitting [0,1) at {t}", sw < base - 1e-9,
                            "published", sw, f"< {base:.12g}"))
    return checks


_SPOT = "universal claims are spot-checked on the listed splits only"

SCENARIOS = {
    s.id: s
    for s in [
        Scenario("pareto_1", "refining three-agent example; the finer equilibrium dominates", _pareto_1),
        Scenario("relative_scarcity", "price ratio of two fixed commodities along a family", _relative_scarcity,
                 "u1/u2 traces phi(1 - t), the mirror image of phi"),
        Scenario("opposed_eta", "two agents with opposed densities, threshold classifications", _opposed_eta),
        Scenario("opposed_derivative", "derivative of agent 1's utility in the disputed cell's left end",
                 _opposed_derivative),
        Scenario("position_switch", "splitting a commodity moves agent 1 to another cell", _position_switch),
        Scenario("welfare_refinement", "refinements never raise competitive welfare here", _welfare_refinement,
                 _SPOT),
        Scenario("optimal_k", "welfare-optimal number of commodities with a per-commodity cost", _optimal_k,
                 "ties in SW(k) - ck resolve to the largest k"),
        Scenario("second_welfare", "an interior Pareto point is an equilibrium after redistributing claims",
                 _second_welfare),
        Scenario("svc_pathology", "every configuration improvable by a finer classification", _svc_pathology),
        Scenario("appendix_pareto_refinement", "three-cell refinements hurt agent 3; a four-cell one dominates",
                 _appendix_pareto_refinement, _SPOT),
        Scenario("appendix_dirac", "atom in the endowment; refining [0,1) lowers welfare", _appendix_dirac, _SPOT),
    ]
}


def run_scenario(scenario_id: str) -> ScenarioReport:
    if scenario_id not in SCENARIOS:
        raise ValidationError(f"unknown scenario {scenario_id!r}; known: {', '.join(SCENARIOS)}")
    s = SCENARIOS[scenario_id]
    t0 = time.perf_counter()
    checks = s.run()
    return ScenarioReport(s.id, s.description, checks, time.perf_counter() - t0, s.note)


def run_all() -> list[ScenarioReport]:
    return [run_scenario(sid) for sid in SCENARIOS]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list) and len(v) > 4:
        return f"[{len(v)} values]"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def format_table(reports) -> str:
    lines = []
    for r in reports:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.id}  ({r.description})")
        if r.note:
            lines.append(f"      note: {r.note}")
        for c in r.checks:
            mark = "ok " if c.passed else "BAD"
            detail = f"expected {_fmt(c.expected)}, observed {_fmt(c.observed)}"
            if c.residual is not None:
                detail += f", residual {c.residual:.3g} (tol {c.tolerance:.3g})"
            lines.append(f"   {mark} {c.quantity}: {detail}  [{c.basis}]")
    return "\n".join(lines)


def to_json(reports) -> str:
    return json.dumps(
        {"passed": all(r.passed for r in reports), "scenarios": [r.to_dict() for r in reports]},
        indent=2,
        default=_plain,
    )
