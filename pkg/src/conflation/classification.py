"""Interval classifications of [0, 1], refinement, and the Hausdorff pseudo-metric."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .measures import TOL, Interval, PiecewiseMeasure

#: Largest combined number of cells accepted by :func:`d_omega`.
MAX_METRIC_CELLS = 20


class Classification:
    """Partition of [0, 1] into consecutive cells ``[c_{j-1}, c_j)``.

    The last cell is closed at 1.  Passing a cut list that ends with a
    repeated 1 (``[0, ..., 1, 1]``) makes the singleton ``{1}`` a cell of
    its own, with the preceding cell open at 1; this is how an atom at 1
    becomes a separate commodity.

    Cuts closer than ``1e-12`` to their predecessor are dropped.
    """

    def __init__(self, cuts: Sequence[float]):
        cuts = [float(c) for c in cuts]
        if len(cuts) < 2:
            raise ValidationError("a classification needs at least the cuts 0 and 1")
        singleton = len(cuts) >= 3 and abs(cuts[-1] - 1) <= TOL and abs(cuts[-2] - 1) <= TOL
        if singleton:
            cuts = cuts[:-1]
        if abs(cuts[0]) > TOL or abs(cuts[-1] - 1) > TOL:
            raise ValidationError(f"cuts must start at 0 and end at 1, got {cuts}")
        kept = [0.0]
        for c in cuts[1:]:
            if c < kept[-1] - TOL:
                raise ValidationError(f"cuts must be increasing, got {cuts}")
            if c - kept[-1] > TOL:
                kept.append(c)
            elif c == cuts[-1]:
                kept[-1] = c
        kept[-1] = 1.0
        if len(kept) < 2:
            raise ValidationError("a classification needs at least one cell")
        self.cuts = np.array(kept)
        self.singleton_one = singleton

    @property
    def cells(self) -> list[Interval]:
        c = self.cuts
        cells = [Interval(c[j], c[j + 1], closed=False) for j in range(len(c) - 2)]
        cells.append(Interval(c[-2], 1.0, closed=not self.singleton_one))
        if self.singleton_one:
            cells.append(Interval(1.0, 1.0, closed=True))
        return cells

    @property
    def k(self) -> int:
        return len(self.cuts) - 1 + int(self.singleton_one)

    def __len__(self):
        return self.k

    def masses(self, omega: PiecewiseMeasure) -> np.ndarray:
        return np.array([omega.measure_of(c) for c in self.cells])

    def cell_index(self, t: float) -> int:
        for j, cell in enumerate(self.cells):
            if cell.contains(t):
                return j
        raise ValidationError(f"point {t} outside [0, 1]")

    def to_list(self) -> list[float]:
        out = [float(c) for c in self.cuts]
        if self.singleton_one:
            out.append(1.0)
        return out

    def to_dict(self) -> dict:
        return {"cuts": self.to_list()}

    @classmethod
    def from_dict(cls, data: dict) -> "Classification":
        try:
            return cls(data["cuts"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed classification: {exc!r}") from exc

    @classmethod
    def trivial(cls) -> "Classification":
        return cls([0.0, 1.0])

    @classmethod
    def uniform(cls, k: int) -> "Classification":
        return cls(np.linspace(0.0, 1.0, k + 1))

    def __eq__(self, other):
        return (
            isinstance(other, Classification)
            and self.singleton_one == other.singleton_one
            and len(self.cuts) == len(other.cuts)
            and bool(np.all(np.abs(self.cuts - other.cuts) <= TOL))
        )

    def __hash__(self):
        return hash((tuple(np.round(self.cuts, 12)), self.singleton_one))

    def __repr__(self):
        return f"Classification({self.to_list()})"


def overlap_matrix(pi: Classification, rho: Classification, omega: PiecewiseMeasure) -> np.ndarray:
    """``M[a, b] = omega(pi_cell_a & rho_cell_b)``."""
    out = np.zeros((pi.k, rho.k))
    for a, c in enumerate(pi.cells):
        for b, d in enumerate(rho.cells):
            inter = c.intersect(d)
            if inter is not None:
                out[a, b] = omega.measure_of(inter)
    return out


def refine_check(rho: Classification, pi: Classification, omega: PiecewiseMeasure, tol: float = TOL) -> bool:
    """True when every cell of ``pi`` is, up to omega-null sets, a union of ``rho`` cells."""
    m = overlap_matrix(pi, rho, omega)
    spill = m.sum(axis=0) - m.max(axis=0)
    return bool(np.all(spill <= tol))


def _subset_membership(k: int) -> np.ndarray:
    codes = np.arange(2 ** k)[:, None]
    return ((codes >> np.arange(k)) & 1).astype(float)


def d_omega(pi: Classification, rho: Classification, omega: PiecewiseMeasure) -> float:
    """Hausdorff distance between the algebras generated by ``pi`` and ``rho``.

    Both algebras are enumerated exhaustively; the symmetric difference of
    two unions is measured on the common refinement.
    """
    if pi.k + rho.k > MAX_METRIC_CELLS:
        raise CapacityError(
            f"{pi.k} + {rho.k} cells exceeds the enumeration cap of {MAX_METRIC_CELLS}"
        )
    m = overlap_matrix(pi, rho, omega)
    a_idx, b_idx = np.nonzero(m > 0)
    w = m[a_idx, b_idx]
    # membership of each common-refinement piece in each union of cells
    A = _subset_membership(pi.k)[:, a_idx]
    B = _subset_membership(rho.k)[:, b_idx]
    sym = (A * w) @ (1 - B).T + ((1 - A) * w) @ B.T
    return float(max(sym.min(axis=1).max(), sym.min(axis=0).max()))


def random_perturbation(pi: Classification, epsilon: float, seed: int) -> Classification:
    """Move each interior cut by an independent uniform draw in ``[-epsilon, epsilon]``."""
    widths = np.diff(pi.cuts)
    if epsilon <= 0 or epsilon >= widths.min() / 2:
        raise ValidationError(
            f"epsilon={epsilon} must be positive and below half the narrowest cell ({widths.min() / 2})"
        )
    rng = np.random.default_rng(seed)
    cuts = pi.cuts.copy()
    cuts[1:-1] += rng.uniform(-epsilon, epsilon, size=len(cuts) - 2)
    out = cuts.tolist()
    if pi.singleton_one:
        out.append(1.0)
    return Classification(out)
