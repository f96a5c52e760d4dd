"""Ready-made economies used throughout the tests, scenarios and demos.

Each builder returns an :class:`Economy`; the ``*_family`` helpers
return the one-parameter classification families swept over in the
scenarios.  Agents are listed group by group.
"""

from __future__ import annotations

from fractions import Fraction

from .classification import Classification
from .economy import CES, Agent, CobbDouglas, Economy, Linear
from .measures import Interval, PiecewiseMeasure, svc_intervals

PM = PiecewiseMeasure


def _linear_economy(evaluations, claims=None, omega=None) -> Economy:
    n = len(evaluations)
    claims = claims or [1.0 / n] * n
    return Economy(omega or PM.lebesgue(), [Agent(c, Linear(ev)) for c, ev in zip(claims, evaluations)])


def _equal_claims(n: int) -> list[float]:
    return [float(Fraction(1, n))] * n


def pareto_one() -> Economy:
    """Three agents; agent 1 wants only the first third, agents 2 and 3 the rest."""
    nu1 = PM.from_segments([(0, 1 / 3, 3.0)])
    nu23 = PM.from_segments([(1 / 3, 1 / 2, 3.0), (1 / 2, 1, 1.0)])
    return _linear_economy([nu1, nu23, nu23], _equal_claims(3))


def relative_scarcity(n: int = 1) -> Economy:
    """Two groups of ``n`` agents valuing opposite halves at density 2."""
    nu1 = PM.from_segments([(0, 0.5, 2.0)])
    nu2 = PM.from_segments([(0.5, 1, 2.0)])
    return _linear_economy([nu1] * n + [nu2] * n, _equal_claims(2 * n))


def relative_scarcity_family(t: float) -> Classification:
    return Classification([0.0, 0.25, (1 + 2 * t) / 4, 0.75, 1.0])


def relative_scarcity_ratio(t: float) -> float:
    """Closed-form price ratio of the first and last cell."""
    if t <= 1 / 6:
        return 1 / (1 - 2 * t)
    if t <= 1 / 2:
        return 2 / (1 + 2 * t)
    if t <= 5 / 6:
        return (3 - 2 * t) / 2
    return 2 * t - 1


def opposed_linear() -> Economy:
    """Densities ``2(1 - t)`` and ``2t``."""
    return _linear_economy([PM.linear_density(2.0, -2.0), PM.linear_density(0.0, 2.0)])


def threshold_family(eta: float) -> Classification:
    return Classification([0.0, eta, 1.0])


def opposed_utilities(eta: float) -> tuple[float, float]:
    """Closed-form equilibrium utilities of :func:`opposed_linear` under ``[0, eta), [eta, 1]``."""
    lo, hi = 1 - 2 ** 0.5 / 2, 2 ** 0.5 / 2
    if eta <= lo:
        return 0.5, (1 + eta) / (2 * (1 - eta))
    if eta < hi:
        return 2 * eta - eta ** 2, 1 - eta ** 2
    return (2 - eta) / (2 * eta), 0.5


def position_switch() -> Economy:
    """Four agents; splitting the last cell flips agent 1 from the first cell to the second."""
    nu1 = PM.from_segments([(0, 2 / 3, 1.5)])
    nu2 = PM.from_segments([(0, 1 / 3, 1.5), (2 / 3, 1, 1.5)])
    nu3 = PM.from_segments([(1 / 3, 2 / 3, 5 / 3), (2 / 3, 5 / 6, 8 / 3)])
    nu4 = PM.from_segments([(1 / 3, 2 / 3, 5 / 3), (5 / 6, 1, 8 / 3)])
    return _linear_economy([nu1, nu2, nu3, nu4], [1 / 3, 1 / 3, 1 / 6, 1 / 6])


def welfare_refinement(n: int = 2) -> Economy:
    """Two groups of ``n``; group 1 values everything, group 2 only the upper half."""
    nu1 = PM.from_segments([(0, 0.5, 1.0), (0.5, 0.75, 1.5), (0.75, 1, 0.5)])
    nu2 = PM.from_segments([(0.5, 1, 2.0)])
    return _linear_economy([nu1] * n + [nu2] * n, _equal_claims(2 * n))


def optimal_k_example(m: int) -> Economy:
    """``m`` agents over ``m**2`` equal cells with interleaved, disjoint supports."""
    size = 1.0 / m ** 2
    base = m ** 2 / (m + 1)
    evaluations = []
    for i in range(1, m + 1):
        cells = {j * m - i: base for j in range(1, m + 1)}
        cells[i * m - i] += base
        evaluations.append(PM.from_segments([(q * size, (q + 1) * size, d) for q, d in sorted(cells.items())]))
    return _linear_economy(evaluations, _equal_claims(m))


def optimal_k_cells(m: int) -> Classification:
    return Classification([q / m ** 2 for q in range(m ** 2 + 1)])


def identical_agents(n: int = 3) -> Economy:
    return _linear_economy([PM.lebesgue()] * n, _equal_claims(n))


def disjoint_pair() -> Economy:
    return _linear_economy([PM.from_segments([(0, 0.5, 2.0)]), PM.from_segments([(0.5, 1, 2.0)])])


def svc_economy(depth: int) -> Economy:
    """Agent 1 values the depth-``depth`` SVC set at density 2, agent 2 its complement."""
    kept = svc_intervals(depth)
    gaps = [Interval(a.hi, b.lo, closed=False) for a, b in zip(kept, kept[1:])]
    return _linear_economy([PM.indicator(kept, 2.0), PM.indicator(gaps, 2.0)])


def pareto_refinement() -> Economy:
    """Four agents; every three-cell refinement hurts agent 3 or 4."""
    nu1 = PM.from_segments([(0, 0.25, 2.0), (0.75, 1, 2.0)])
    nu2 = PM.from_segments([(0.25, 0.75, 2.0)])
    nu3 = PM.from_segments([(0, 0.5, 2.0)])
    nu4 = PM.from_segments([(0.5, 1, 2.0)])
    return _linear_economy([nu1, nu2, nu3, nu4], _equal_claims(4))


def eps_classification(eps: float) -> Classification:
    return Classification([0.0, 0.25 - eps, 0.5, 0.75 - eps, 1.0])


def dirac_economy(n: int = 1) -> Economy:
    """Endowment half Lebesgue, half an atom at 1."""
    omega = 0.5 * (PM.lebesgue() + PM([0.0, 1.0], [0.0], [0.0], [(1.0, 1.0)]))
    nu1 = PM.lebesgue()
    nu2 = PM.from_segments([(0, 0.5, 0.25), (0.5, 1, 0.75)], atoms=[(1.0, 0.5)])
    return _linear_economy([nu1] * n + [nu2] * n, _equal_claims(2 * n), omega)


def dirac_cells() -> Classification:
    """``[0, 1)`` and the singleton ``{1}``."""
    return Classification([0.0, 1.0, 1.0])


def cobb_douglas_pair(a1, a2, claims=(0.5, 0.5), cuts=(0.0, 0.5, 1.0)) -> Economy:
    """Two Cobb-Douglas agents whose evaluation of cell ``j`` is ``a[j]`` (piecewise uniform)."""
    cuts = list(cuts)

    def ev(a):
        return PM.from_segments([(lo, hi, w / (hi - lo)) for lo, hi, w in zip(cuts, cuts[1:], a)])

    return Economy(PM.lebesgue(), [Agent(claims[0], CobbDouglas(ev(a1))), Agent(claims[1], CobbDouglas(ev(a2)))])


def ces_pair(rho: float = 0.5) -> Economy:
    """Two CES agents with mirror-image evaluations over two halves."""
    nu1 = PM.from_segments([(0, 0.5, 1.5), (0.5, 1, 0.5)])
    nu2 = PM.from_segments([(0, 0.5, 0.5), (0.5, 1, 1.5)])
    return Economy(PM.lebesgue(), [Agent(0.5, CES(nu1, rho)), Agent(0.5, CES(nu2, rho))])
