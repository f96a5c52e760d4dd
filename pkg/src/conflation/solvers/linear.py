"""Linear Fisher markets: proportional-response dynamics with exact support polishing.

Bids ``b[i, C]`` evolve by the proportional-response rule

    b[i, C] <- claim_i * (utility agent i draws from C) / (total utility of i)

and prices are column sums of bids divided by supplies.  Bids on edges
outside the equilibrium support decay geometrically, so after a while
the support is visible.  From a candidate support the exact equilibrium
prices follow from the equal bang-per-buck conditions inside each
connected component plus money balance per component; a flow on the
support then gives the allocation.  The result is accepted only if it
passes :func:`verify_equilibrium`, so correctness never depends on the
dynamics having converged to machine precision.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from ..economy import CommodityEconomy
from ..errors import SolverError, ValidationError
from .equilibrium import Equilibrium, verify_equilibrium

MAX_ITER = 200_000
PRICE_TOL = 1e-10
CERT_TOL = 1e-9
_SUPPORT_THRESHOLDS = (1e-4, 1e-7, 1e-10)


def _components(support: np.ndarray):
    """Connected components of the bipartite support graph (agents, cells)."""
    n, k = support.shape
    parent = list(range(n + k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in zip(*np.nonzero(support)):
        ra, rb = find(i), find(n + j)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for node in range(n + k):
        groups.setdefault(find(node), []).append(node)
    out = []
    for nodes in groups.values():
        agents = [v for v in nodes if v < n]
        cells = [v - n for v in nodes if v >= n]
        out.append((agents, cells))
    return out


def _support_prices(ce: CommodityEconomy, support: np.ndarray):
    """Prices forced by equal bang-per-buck along ``support``, or ``None`` if inconsistent."""
    v = ce.valuations / ce.supplies
    n, k = support.shape
    logp = np.full(k, np.nan)
    prices = np.zeros(k)
    for agents, cells in _components(support):
        if not agents:
            continue
        if not cells:
            return None
        loggam = {agents[0]: 0.0}
        queue = [("a", agents[0])]
        seen_cells = set()
        while queue:
            side, node = queue.pop()
            if side == "a":
                for j in np.nonzero(support[node])[0]:
                    val = loggam[node] + np.log(v[node, j])
                    if j in seen_cells:
                        if abs(logp[j] - val) > 1e-9:
                            return None
                        continue
                    logp[j] = val
                    seen_cells.add(j)
                    queue.append(("c", j))
            else:
                for i in np.nonzero(support[:, node])[0]:
                    val = logp[node] - np.log(v[i, node])
                    if i in loggam:
                        if abs(loggam[i] - val) > 1e-9:
                            return None
                        continue
                    loggam[i] = val
                    queue.append(("a", i))
        raw = np.exp(logp[cells] - np.max(logp[cells]))
        money = ce.claims[agents].sum()
        prices[cells] = raw * money / (raw @ ce.supplies[cells])
    return prices


def _support_is_best(ce: CommodityEconomy, support: np.ndarray, prices: np.ndarray) -> bool:
    """Every support edge attains its agent's maximum bang-per-buck."""
    v = ce.valuations / ce.supplies
    if np.any((prices <= 0) & (v > 0).any(axis=0)):
        return False
    bpb = v / np.where(prices > 0, prices, 1.0) * (prices > 0)
    best = bpb.max(axis=1, keepdims=True)
    return bool(np.all(~support | (bpb >= best * (1 - CERT_TOL))))


def _support_flow(ce: CommodityEconomy, support: np.ndarray, prices: np.ndarray, start: np.ndarray):
    """Bids on ``support`` with row sums = claims and column sums = cell revenues."""
    rows = ce.claims
    cols = prices * ce.supplies
    b = np.where(support, np.maximum(start, 1e-300), 0.0)
    for _ in range(500):
        b *= (rows / b.sum(axis=1))[:, None]
        colsum = b.sum(axis=0)
        b *= np.where(colsum > 0, cols / np.where(colsum > 0, colsum, 1.0), 0.0)
        err = np.max(np.abs(b.sum(axis=1) - rows))
        if err < 1e-14:
            return b
    # Sinkhorn stalls when the flow must vanish on some support edge
    edges = list(zip(*np.nonzero(support)))
    A = np.zeros((ce.n + ce.k, len(edges)))
    for e, (i, j) in enumerate(edges):
        A[i, e] = 1.0
        A[ce.n + j, e] = 1.0
    rhs = np.concatenate((rows, cols))
    keep = np.concatenate((np.ones(ce.n, bool), cols > 0))
    sol = linprog(np.zeros(len(edges)), A_eq=A[keep], b_eq=rhs[keep], bounds=(0, None), method="highs")
    if not sol.success:
        return None
    out = np.zeros_like(b)
    for e, (i, j) in enumerate(edges):
        out[i, j] = sol.x[e]
    return out


def _assemble(ce: CommodityEconomy, bids: np.ndarray, prices: np.ndarray, iterations: int) -> Equilibrium:
    x = np.zeros_like(bids)
    pos = prices > 0
    x[:, pos] = bids[:, pos] / prices[pos]
    # goods nobody values are free; hand them out in proportion to claims
    x[:, ~pos] = np.outer(ce.claims, ce.supplies[~pos])
    eq = Equilibrium(prices, x, ce.utilities(np.maximum(x, 0.0)), iterations)
    return eq


def _polish(ce: CommodityEconomy, bids: np.ndarray, iterations: int, tried: set):
    for thresh in _SUPPORT_THRESHOLDS:
        support = bids > thresh * ce.claims[:, None]
        key = support.tobytes()
        if key in tried or not support.any(axis=1).all():
            continue
        tried.add(key)
        prices = _support_prices(ce, support)
        if prices is None or not _support_is_best(ce, support, prices):
            continue
        flow = _support_flow(ce, support, prices, bids)
        if flow is None:
            continue
        eq = _assemble(ce, flow, prices, iterations)
        report = verify_equilibrium(ce, eq, CERT_TOL)
        if report.passed:
            eq.residuals = report.residuals
            return eq
    return None


def solve_linear(
    ce: CommodityEconomy,
    max_iter: int = MAX_ITER,
    price_tol: float = PRICE_TOL,
    check_every: int = 20,
) -> Equilibrium:
    """Competitive equilibrium of a linear economy E(pi).

    Prices are normalized so the whole endowment is worth 1; agent
    ``i``'s budget is then exactly its claim.
    """
    if any(kind != "linear" for kind in ce.kinds):
        raise ValidationError("solve_linear needs every agent to have linear utility")
    nu = ce.valuations
    if np.any(nu.sum(axis=1) <= 0):
        raise ValidationError("every agent must value at least one cell")
    s = ce.supplies
    kappa = ce.claims
    bids = kappa[:, None] * nu / nu.sum(axis=1, keepdims=True)
    prices = bids.sum(axis=0) / s
    valued = prices > 0
    change = np.inf
    tried = set()
    for it in range(1, max_iter + 1):
        spend = bids.sum(axis=0)
        contrib = nu * bids / np.where(spend > 0, spend, 1.0)
        u = contrib.sum(axis=1)
        new_bids = kappa[:, None] * contrib / u[:, None]
        new_prices = new_bids.sum(axis=0) / s
        # prices can sit still while bids are still migrating (symmetric markets)
        change = max(
            np.max(np.abs(new_prices[valued] - prices[valued]) / prices[valued]),
            np.max(np.abs(new_bids - bids) / kappa[:, None]),
        )
        bids = new_bids
        prices = new_prices
        converged = change < price_tol
        if converged or it % check_every == 0:
            eq = _polish(ce, bids, it, tried)
            if eq is not None:
                return eq
        if converged:
            break
        if it >= 50 * check_every:
            check_every = min(check_every * 2, 2000)
    eq = _assemble(ce, bids, prices, it)
    report = verify_equilibrium(ce, eq, 1e-6)
    eq.residuals = report.residuals
    if report.passed:
        return eq
    raise SolverError(
        f"proportional response did not certify after {it} iterations: {report.failures}",
        residuals={**report.residuals, "price_change": change},
        iterations=it,
    )
