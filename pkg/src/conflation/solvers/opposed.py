"""Closed-form equilibrium for two linear agents with opposed preferences.

Agent 1's density is strictly decreasing and agent 2's strictly
increasing, claims are equal and the endowment is Lebesgue measure.
Every cell left of the disputed cell goes to agent 1, every cell right
of it to agent 2, and the disputed cell is split according to a single
scalar (``xi``).  The search for the disputed cell starts at the cell
holding the leveling point; when that cell cannot balance the budgets
(``xi`` outside ``[0, 1]`` with a neighbour that could take the share)
it moves towards that neighbour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..classification import Classification
from ..economy import Economy
from ..errors import ValidationError
from ..measures import PiecewiseMeasure


@dataclass
class OpposedReport:
    theta: float
    theta_index: int
    disputed_index: int
    xi: float
    left_block: list
    right_block: list
    disputed_split: tuple
    utilities: tuple
    allocation: np.ndarray
    nu1_left: float
    nu1_disputed: float
    nu2_right: float
    nu2_disputed: float


def _validate(e: Economy) -> tuple[PiecewiseMeasure, PiecewiseMeasure]:
    if e.n != 2 or e.kinds != {"linear"}:
        raise ValidationError("opposed preferences need exactly two linear agents")
    if abs(e.agents[0].claim - e.agents[1].claim) > 1e-12:
        raise ValidationError("opposed preferences need equal claims")
    if not e.omega.is_lebesgue():
        raise ValidationError("opposed preferences need Lebesgue endowment")
    nu1, nu2 = e.evaluations()
    if not nu1.is_monotone(decreasing=True):
        raise ValidationError("agent 1's density must be strictly decreasing")
    if not nu2.is_monotone(decreasing=False):
        raise ValidationError("agent 2's density must be strictly increasing")
    return nu1, nu2


def _quadratic_root_in(a: float, b: float, c: float, lo: float, hi: float) -> float | None:
    """Root of ``a t^2 + b t + c`` inside ``[lo, hi]``."""
    eps = 1e-12 * max(1.0, hi - lo)
    if abs(a) < 1e-15:
        if abs(b) < 1e-15:
            return None
        roots = [-c / b]
    else:
        disc = b * b - 4 * a * c
        if disc < 0:
            if disc > -1e-14:
                disc = 0.0
            else:
                return None
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        roots = [q / a] + ([c / q] if q != 0 else [])
    for r in roots:
        if lo - eps <= r <= hi + eps:
            return min(max(r, lo), hi)
    return None


def leveling_point(nu1: PiecewiseMeasure, nu2: PiecewiseMeasure) -> float:
    """The point where ``nu1([0, theta)) == nu2([theta, 1])``.

    ``g(t) = nu1([0, t)) + nu2([0, t)) - nu2(I)`` is increasing; the piece
    where it changes sign is located on the merged breakpoints and the
    root is taken from the piece's quadratic.
    """
    total2 = nu2.total()
    pts = np.union1d(nu1.breakpoints, nu2.breakpoints)
    g = nu1.cumulative(pts) + nu2.cumulative(pts) - total2
    k = int(np.searchsorted(g, 0.0, side="left"))
    if k < len(pts) and g[k] == 0.0:
        return float(pts[k])
    lo, hi = pts[k - 1], pts[k]
    mid = 0.5 * (lo + hi)
    i1, i2 = nu1._piece_index(mid), nu2._piece_index(mid)
    a0, a1 = nu1.c0[i1] + nu2.c0[i2], nu1.c1[i1] + nu2.c1[i2]
    # g(t) = g(lo) + a0 (t - lo) + a1/2 (t^2 - lo^2)
    root = _quadratic_root_in(0.5 * a1, a0, g[k - 1] - a0 * lo - 0.5 * a1 * lo * lo, lo, hi)
    if root is None:
        raise ValidationError("could not locate the leveling point")
    return float(root)


def _xi(nu1, nu2, cells, j):
    v1l, v1d = nu1.measure_of_union(cells[:j]), nu1.measure_of(cells[j])
    v2r, v2d = nu2.measure_of_union(cells[j + 1:]), nu2.measure_of(cells[j])
    if v1d <= 0 or v2d <= 0:
        raise ValidationError("both agents must value the disputed cell")
    return 0.5 * (v2r / v2d - v1l / v1d + 1.0), v1l, v1d, v2r, v2d


def _disputed_cell(nu1, nu2, cells, start):
    """Cell whose ``xi`` is consistent with equilibrium, searching outward from ``start``.

    ``xi_j > 1`` means agent 1 could still afford more after taking all of
    cell ``j``; that is an equilibrium only if agent 1 would not buy any of
    cell ``j + 1`` (``xi_{j+1} <= 0``).  Symmetrically for ``xi_j < 0``.
    """
    k = len(cells)
    xi = {}

    def get(j):
        if j not in xi:
            xi[j] = _xi(nu1, nu2, cells, j)
        return xi[j]

    j = start
    while True:
        x = get(j)[0]
        if x > 1 and j + 1 < k and get(j + 1)[0] > 0:
            j += 1
        elif x < 0 and j > 0 and get(j - 1)[0] < 1:
            j -= 1
        else:
            return j, get(j)


def solve_opposed(e: Economy, pi: Classification) -> OpposedReport:
    nu1, nu2 = _validate(e)
    theta = leveling_point(nu1, nu2)
    cells = pi.cells
    j0 = pi.cell_index(theta)
    j, (xi, v1l, v1d, v2r, v2d) = _disputed_cell(nu1, nu2, cells, j0)
    left, right = cells[:j], cells[j + 1:]
    disputed = cells[j]
    size = disputed.length
    x = min(max(xi, 0.0), 1.0) * size
    y = size - x
    alloc = np.zeros((2, pi.k))
    alloc[0, :j] = [c.length for c in left]
    alloc[1, j + 1:] = [c.length for c in right]
    alloc[0, j], alloc[1, j] = x, y
    u1 = v1l + (x / size) * v1d
    u2 = v2r + (y / size) * v2d
    return OpposedReport(
        theta=theta,
        theta_index=j0,
        disputed_index=j,
        xi=xi,
        left_block=left,
        right_block=right,
        disputed_split=(x, y),
        utilities=(u1, u2),
        allocation=alloc,
        nu1_left=v1l,
        nu1_disputed=v1d,
        nu2_right=v2r,
        nu2_disputed=v2d,
    )


def opposed_derivative(e: Economy, pi: Classification) -> float:
    """Derivative of agent 1's equilibrium utility in the left end of the disputed cell."""
    rep = solve_opposed(e, pi)
    if rep.disputed_index == 0:
        raise ValidationError("the disputed cell starts at 0; its left end cannot move")
    nu1, nu2 = e.evaluations()
    theta1 = float(pi.cuts[rep.disputed_index])
    f1, f2 = float(nu1.density(theta1)), float(nu2.density(theta1))
    if rep.xi <= 0:
        return f1
    if rep.xi >= 1:
        return 0.0
    return rep.nu2_right / (2 * rep.nu2_disputed ** 2) * (rep.nu1_disputed * f2 - f1 * rep.nu2_disputed)
