"""Comparisons across classifications: dominance, welfare, sweeps and design searches."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classification import Classification
from .economy import Configuration, Economy, induce
from .errors import ConflationError, ValidationError
from .measures import TOL, svc_gaps
from .solvers import Equilibrium, solve
from . import catalog

#: Margin separating genuine dominance from solver noise.
PARETO_MARGIN = 1e-9

Family = Callable[[float], Classification]


def pareto_dominates(e: Economy, a: Configuration, b: Configuration) -> bool:
    """``a`` is weakly better for everyone and strictly better for someone."""
    ua, ub = a.utilities(e), b.utilities(e)
    return bool(np.all(ua >= ub - PARETO_MARGIN) and np.any(ua > ub + PARETO_MARGIN))


def social_welfare(e: Economy, cfg: Configuration) -> float:
    return float(cfg.utilities(e).sum())


def competitive_configuration(e: Economy, pi: Classification) -> tuple[Configuration, Equilibrium]:
    eq = solve(induce(e, pi))
    return Configuration(pi, np.maximum(eq.allocation, 0.0)), eq


@dataclass
class SweepResult:
    """One record per grid point; failed solves are NaN rows listed in ``failures``."""

    grid: np.ndarray
    prices: list
    price_ratio: np.ndarray
    utilities: np.ndarray
    welfare: np.ndarray
    failures: dict = field(default_factory=dict)

    @property
    def argmax_welfare(self) -> float:
        return float(self.grid[np.nanargmax(self.welfare)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.utilities.shape[1]
        w.writerow(["t", "price_ratio"] + [f"u_{i + 1}" for i in range(n)] + ["welfare"])

        def fmt(v):
            return "" if v is None or not np.isfinite(v) else f"{v:.12g}"

        for t, r, u, sw in zip(self.grid, self.price_ratio, self.utilities, self.welfare):
            w.writerow([fmt(t), fmt(r)] + [fmt(v) for v in u] + [fmt(sw)])
        return buf.getvalue()


def _sweep(e: Economy, family: Family, grid, cells=None) -> SweepResult:
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("sweep grid must be strictly increasing")
    prices, ratio = [], np.full(len(grid), np.nan)
    utils = np.full((len(grid), e.n), np.nan)
    failures = {}
    for k, t in enumerate(grid):
        try:
            eq = solve(induce(e, family(float(t))))
        except ConflationError as exc:
            failures[float(t)] = str(exc)
            prices.append(None)
            continue
        prices.append(eq.prices)
        utils[k] = eq.utilities
        if cells is not None:
            a, b = cells
            ratio[k] = eq.prices[a] / eq.prices[b]
    return SweepResult(grid, prices, ratio, utils, utils.sum(axis=1), failures)


def price_ratio_sweep(e: Economy, family: Family, cell_a: int, cell_b: int, grid) -> SweepResult:
    """Equilibrium price ratio of two fixed cells along a classification family."""
    return _sweep(e, family, grid, (cell_a, cell_b))


def utility_sweep(e: Economy, family: Family, grid) -> SweepResult:
    return _sweep(e, family, grid)


def aligned_grid(n: int, anchors: Sequence[float], lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """``n`` equally spaced points strictly inside ``(lo, hi)`` that hit every anchor.

    The spacing is the coarsest common submultiple of the anchor gaps that
    fits ``n`` points, and the grid is placed as close to centered as the
    anchors allow.
    """
    anchors = sorted(float(a) for a in anchors)
    if not anchors:
        return np.linspace(lo, hi, n + 2)[1:-1]
    gaps = [b - a for a, b in zip(anchors, anchors[1:])]
    for m in range(1, 100_000):
        h = gaps[0] / m if gaps else (hi - lo) / (n + 1)
        on_grid = all(abs(g / h - round(g / h)) < 1e-9 for g in gaps)
        if on_grid and (n - 1) * h < hi - lo:
            break
    else:
        raise ValidationError("no aligned grid found")
    shift = round((anchors[0] - 0.5 * (lo + hi)) / h + 0.5 * (n - 1))
    pts = anchors[0] + h * (np.arange(n) - shift)
    if pts[0] <= lo or pts[-1] >= hi:
        raise ValidationError("aligned grid does not fit inside the interval")
    return pts


# -- optimal classification with k commodities -------------------------------


def _cut_grid(e: Economy, grid_resolution: int) -> np.ndarray:
    pts = [np.linspace(0.0, 1.0, grid_resolution + 1)]
    pts += [ev.breakpoints for ev in e.evaluations()]
    pts.append(e.omega.breakpoints)
    g = np.unique(np.concatenate(pts))
    return g[np.concatenate(([True], np.diff(g) > TOL))]


def _require_linear(e: Economy):
    if e.kinds != {"linear"}:
        raise ValidationError("welfare-optimal classification is only supported for linear agents")


def sw_max_table(e: Economy, k_max: int, grid_resolution: int = 100):
    """Best welfare with at most ``k`` cells for ``k = 1..k_max`` on a cut grid.

    With linear utility the whole cell goes to its highest evaluator, so
    the welfare of a classification is ``sum_C max_i nu_i(C)``; the
    dynamic program runs over (last cut, cells used).
    """
    _require_linear(e)
    g = _cut_grid(e, grid_resolution)
    G = len(g)
    cum = np.array([ev.cumulative(g) for ev in e.evaluations()])
    cum[:, -1] = [ev.total() for ev in e.evaluations()]
    # w[a, b] = best single-owner value of the cell [g_a, g_b)
    w = np.max(cum[:, None, :] - cum[:, :, None], axis=0)
    omega_cum = e.omega.cumulative(g)
    omega_cum[-1] = e.omega.total()
    valid = (omega_cum[None, :] - omega_cum[:, None]) > TOL
    w = np.where(valid & np.triu(np.ones((G, G), bool), 1), w, -np.inf)

    best = np.full((k_max + 1, G), -np.inf)
    back = np.zeros((k_max + 1, G), dtype=int)
    best[0, 0] = 0.0
    for m in range(1, k_max + 1):
        cand = best[m - 1][:, None] + w
        back[m] = np.argmax(cand, axis=0)
        best[m] = cand[back[m], np.arange(G)]
    results = []
    for k in range(1, k_max + 1):
        m = int(np.argmax(best[1:k + 1, G - 1])) + 1
        cuts = [G - 1]
        for level in range(m, 0, -1):
            cuts.append(back[level, cuts[-1]])
        idx = cuts[::-1]
        results.append((float(best[m, G - 1]), Classification(g[idx])))
    return results


def _greedy_configuration(e: Economy, pi: Classification) -> Configuration:
    ce = induce(e, pi)
    owner = np.argmax(ce.valuations, axis=0)
    alloc = np.zeros((e.n, pi.k))
    alloc[owner, np.arange(pi.k)] = ce.supplies
    return Configuration(pi, alloc)


def sw_max(e: Economy, k: int, grid_resolution: int = 100):
    """``(value, classification, configuration)`` maximizing welfare with at most ``k`` cells."""
    if k < 1:
        raise ValidationError("k must be a positive integer")
    value, pi = sw_max_table(e, k, grid_resolution)[-1]
    return value, pi, _greedy_configuration(e, pi)


@dataclass
class OptimalKResult:
    cost: float
    table: list
    k_star: int
    k_bar: float
    ties: list

    def to_dict(self) -> dict:
        return {
            "cost": self.cost,
            "k_star": self.k_star,
            "k_bar": self.k_bar,
            "ties": self.ties,
            "table": [{"k": k, "sw": sw, "net": net} for k, sw, net in self.table],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def optimal_k(e: Economy, c: float, grid_resolution: int = 100, tie_tol: float = 1e-9) -> OptimalKResult:
    """Maximize ``SW(k) - c k`` over ``k = 1..ceil(k_bar)``.

    ``k_bar = (sum_i nu_i(I) - max_i nu_i(I) + c) / c``, which reduces to
    ``(n - (1 - c)) / c`` when every evaluation has mass 1.  Among values
    within ``tie_tol`` of the best the largest ``k`` is reported; all tied
    values are listed in ``ties``.
    """
    if not 0.0 < c < 1.0:
        raise ValidationError("cost must lie in (0, 1)")
    _require_linear(e)
    totals = [ev.total() for ev in e.evaluations()]
    k_bar = (sum(totals) - max(totals) + c) / c
    k_max = max(1, math.ceil(k_bar - 1e-9))
    rows = sw_max_table(e, k_max, grid_resolution)
    table = [(k, sw, sw - c * k) for k, (sw, _) in enumerate(rows, start=1)]
    top = max(net for _, _, net in table)
    ties = [k for k, _, net in table if net >= top - tie_tol]
    return OptimalKResult(c, table, max(ties), k_bar, ties)


# -- searching for dominating competitive configurations ---------------------


def find_dominating_competitive(e: Economy, cfg: Configuration, cut_grid, k_max: int):
    """First classification on ``cut_grid`` (at most ``k_max`` cells) whose equilibrium dominates ``cfg``.

    Classifications are visited by number of cells, then lexicographically
    by cuts.  Returns ``(classification, equilibrium)`` or ``None``.
    """
    _require_linear(e)
    cfg.check_feasible(e)
    grid = sorted({float(c) for c in cut_grid if TOL < c < 1 - TOL})
    for m in range(1, k_max + 1):
        for inner in itertools.combinations(grid, m - 1):
            pi = Classification([0.0, *inner, 1.0])
            try:
                cand, eq = competitive_configuration(e, pi)
            except ValidationError:
                continue
            if pareto_dominates(e, cand, cfg):
                return pi, eq
    return None


def svc_improvement_demo(depth: int, cfg: Configuration):
    """Refine a cell agent 1 holds by carving out a removed interval of the SVC construction.

    The removed interval ``C`` carries no value for agent 1, so handing
    all of it to agent 2 keeps agent 1's utility and strictly raises agent
    2's.  Returns ``(refined classification, improved configuration)``.
    """
    e = catalog.svc_economy(depth)
    cfg.check_feasible(e)
    pi, x = cfg.classification, cfg.allocation
    if not np.any(x[0] > 0):
        raise ValidationError("agent 1 holds nothing; such a configuration cannot be improved this way")
    gaps = sorted(svc_gaps(depth), key=lambda g: (-g.length, g.lo))
    found = None
    for j, cell in enumerate(pi.cells):
        if x[0, j] <= 0:
            continue
        inside = [g for g in gaps if cell.lo <= g.lo and g.hi <= cell.hi]
        if inside:
            found = j, inside[0]
            break
    if found is None:
        raise ValidationError(f"no removed interval of depth {depth} lies inside a cell held by agent 1; increase depth")
    j, gap = found
    B = pi.cells[j]
    rho = Classification(sorted(set(pi.to_list()) | {gap.lo, gap.hi}))

    omega = e.omega
    wB = omega.measure_of(B)
    y = np.zeros((2, rho.k))
    for r, cell in enumerate(rho.cells):
        src = pi.cell_index(0.5 * (cell.lo + cell.hi) if cell.length > 0 else cell.lo)
        if src != j:
            y[:, r] = x[:, src]
        elif abs(cell.lo - gap.lo) < TOL and abs(cell.hi - gap.hi) < TOL:
            y[0, r] = 0.0
            y[1, r] = omega.measure_of(cell) / wB * (x[0, j] + x[1, j])
        else:
            y[:, r] = omega.measure_of(cell) / wB * x[:, j]
    improved = Configuration(rho, y)
    improved.check_feasible(e)
    before, after = cfg.utilities(e), improved.utilities(e)
    if abs(after[0] - before[0]) > 1e-12 or not after[1] > before[1]:
        raise ConflationError(f"construction failed to improve: {before} -> {after}")
    return rho, improved


def cobb_douglas_weighted_optimum(ce, weights) -> np.ndarray:
    """Allocation maximizing ``sum_i w_i log V_i`` in a Cobb-Douglas economy.

    Every interior Pareto optimum arises this way for some positive
    weights: ``x[i, C] = s_C w_i nu_i(C) / sum_l w_l nu_l(C)``.
    """
    if ce.kind != "cobb_douglas":
        raise ValidationError("weighted optimum needs Cobb-Douglas agents")
    w = np.asarray(weights, dtype=float)
    if w.shape != (ce.n,) or np.any(w <= 0):
        raise ValidationError("weights must be positive, one per agent")
    num = w[:, None] * ce.valuations
    den = num.sum(axis=0)
    if np.any(den <= 0):
        raise ValidationError("some cell is valued by nobody")
    return ce.supplies * num / den
