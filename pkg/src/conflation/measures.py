"""Finite measures on [0, 1] with piecewise-linear densities and atoms.

Every measure used by the package (the endowment and each agent's
evaluation measure) is a :class:`PiecewiseMeasure`: a density that is a
degree-one polynomial on each piece of a breakpoint grid, plus finitely
many point masses.  Integration over intervals is done in closed form.

Intervals follow a half-open convention: ``Interval(lo, hi)`` is
``[lo, hi)`` unless ``hi == 1``, in which case it is ``[lo, 1]``.  The
``closed`` flag overrides the default, which lets a cell ``[c, 1)`` sit
next to the singleton ``{1}`` (``Interval(1, 1)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """A subinterval of [0, 1], closed on the left."""

    lo: float
    hi: float
    closed: bool | None = None

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.closed is None:
            object.__setattr__(self, "closed", hi >= 1.0 - TOL)
        if not (-TOL <= lo <= 1 + TOL and -TOL <= hi <= 1 + TOL):
            raise ValidationError(f"interval [{lo}, {hi}] not inside [0, 1]")
        if lo > hi or (lo == hi and not self.closed):
            raise ValidationError(f"empty interval [{lo}, {hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float) -> bool:
        if t < self.lo - TOL:
            return False
        if self.closed:
            return t <= self.hi + TOL
        return t < self.hi - TOL

    def intersect(self, other: "Interval") -> "Interval | None":
        """Intersection with ``other``, or ``None`` when empty."""
        lo = max(self.lo, other.lo)
        if self.hi < other.hi:
            hi, closed = self.hi, self.closed
        elif other.hi < self.hi:
            hi, closed = other.hi, other.closed
        else:
            hi, closed = self.hi, self.closed and other.closed
        if lo > hi or (lo == hi and not closed):
            return None
        return Interval(lo, hi, closed)

    def __repr__(self):
        right = "]" if self.closed else ")"
        return f"[{self.lo:.6g}, {self.hi:.6g}{right}"


class PiecewiseMeasure:
    """Measure with density ``c0 + c1 * t`` on each ``[b_k, b_{k+1})``.

    Parameters
    ----------
    breakpoints : sequence of float
        Strictly increasing, starting at 0 and ending at 1.
    c0, c1 : sequence of float
        Density coefficients, one pair per piece.
    atoms : iterable of (location, mass)
        Point masses; locations distinct, masses positive.
    """

    def __init__(self, breakpoints, c0, c1=None, atoms: Iterable = ()):
        b = np.asarray(breakpoints, dtype=float)
        c0 = np.asarray(c0, dtype=float)
        c1 = np.zeros_like(c0) if c1 is None else np.asarray(c1, dtype=float)
        if b.ndim != 1 or len(b) < 2:
            raise ValidationError("need at least two breakpoints")
        if abs(b[0]) > TOL or abs(b[-1] - 1.0) > TOL:
            raise ValidationError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(b) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        if c0.shape != (len(b) - 1,) or c1.shape != c0.shape:
            raise ValidationError("one (c0, c1) pair is required per piece")
        b[0], b[-1] = 0.0, 1.0
        left = c0 + c1 * b[:-1]
        right = c0 + c1 * b[1:]
        if np.any(left < -TOL) or np.any(right < -TOL):
            raise ValidationError("density must be nonnegative on every piece")
        atoms = sorted((float(a), float(m)) for a, m in atoms)
        for a, m in atoms:
            if not 0.0 <= a <= 1.0:
                raise ValidationError(f"atom at {a} outside [0, 1]")
            if m <= 0:
                raise ValidationError(f"atom mass must be positive, got {m}")
        locs = [a for a, _ in atoms]
        if len(set(locs)) != len(locs):
            raise ValidationError("atom locations must be distinct")
        self.breakpoints = b
        self.c0 = c0
        self.c1 = c1
        self.atoms = tuple(atoms)
        # cumulative density mass at each breakpoint
        self._cum = np.concatenate(([0.0], np.cumsum(self._piece_mass(b[:-1], b[1:], c0, c1))))
        if self.total() <= 0:
            raise ValidationError("total mass must be positive")

    # -- construction helpers -------------------------------------------

    @classmethod
    def lebesgue(cls) -> "PiecewiseMeasure":
        return cls([0.0, 1.0], [1.0], [0.0])

    @classmethod
    def from_segments(cls, segments, atoms=()) -> "PiecewiseMeasure":
        """Build from ``(lo, hi, c0[, c1])`` segments; gaps get density 0."""
        segs = sorted((tuple(float(v) for v in s) for s in segments), key=lambda s: s[0])
        points = [0.0]
        c0, c1 = [], []
        for s in segs:
            lo, hi = s[0], s[1]
            a0 = s[2]
            a1 = s[3] if len(s) > 3 else 0.0
            if hi <= lo:
                raise ValidationError(f"segment [{lo}, {hi}) is empty")
            if lo < points[-1] - TOL:
                raise ValidationError("segments overlap")
            if lo > points[-1] + TOL:
                c0.append(0.0)
                c1.append(0.0)
                points.append(lo)
            c0.append(a0)
            c1.append(a1)
            points.append(hi)
        if points[-1] < 1.0 - TOL:
            c0.append(0.0)
            c1.append(0.0)
            points.append(1.0)
        return cls(points, c0, c1, atoms)

    @classmethod
    def indicator(cls, intervals: Sequence[Interval], scale: float = 1.0) -> "PiecewiseMeasure":
        """``scale`` times Lebesgue measure restricted to a disjoint union."""
        return cls.from_segments([(iv.lo, iv.hi, scale) for iv in intervals if iv.hi > iv.lo])

    @classmethod
    def linear_density(cls, c0: float, c1: float) -> "PiecewiseMeasure":
        return cls([0.0, 1.0], [c0], [c1])

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "PiecewiseMeasure") -> "PiecewiseMeasure":
        pts = np.union1d(self.breakpoints, other.breakpoints)
        pts = pts[np.concatenate(([True], np.diff(pts) > TOL))]
        pts[-1] = 1.0
        mids = 0.5 * (pts[:-1] + pts[1:])
        i, j = self._piece_index(mids), other._piece_index(mids)
        atoms = {}
        for a, m in self.atoms + other.atoms:
            atoms[a] = atoms.get(a, 0.0) + m
        return PiecewiseMeasure(
            pts, self.c0[i] + other.c0[j], self.c1[i] + other.c1[j], atoms.items()
        )

    def __mul__(self, factor: float) -> "PiecewiseMeasure":
        factor = float(factor)
        if factor <= 0:
            raise ValidationError("measures can only be scaled by a positive factor")
        return PiecewiseMeasure(
            self.breakpoints, self.c0 * factor, self.c1 * factor,
            [(a, m * factor) for a, m in self.atoms],
        )

    __rmul__ = __mul__

    # -- evaluation -----------------------------------------------------

    @staticmethod
    def _piece_mass(a, b, c0, c1):
        return c0 * (b - a) + 0.5 * c1 * (b * b - a * a)

    def _piece_index(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return np.clip(idx, 0, len(self.c0) - 1)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        k = self._piece_index(t)
        return self.c0[k] + self.c1[k] * t

    def density_mass_below(self, t):
        """Integral of the density over ``[0, t]`` (atoms excluded)."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        k = self._piece_index(t)
        a = self.breakpoints[k]
        return self._cum[k] + self._piece_mass(a, t, self.c0[k], self.c1[k])

    def cumulative(self, t, include_right=False):
        """``m([0, t))``, or ``m([0, t])`` when ``include_right``."""
        t = np.asarray(t, dtype=float)
        out = np.array(self.density_mass_below(t), dtype=float)
        for a, m in self.atoms:
            hit = (a <= t + TOL) if include_right else (a < t - TOL)
            out = out + m * hit
        return out

    def total(self) -> float:
        return float(self._cum[-1] + sum(m for _, m in self.atoms))

    def atom_mass(self, iv: Interval) -> float:
        return sum(m for a, m in self.atoms if iv.contains(a))

    def measure_of(self, iv: Interval) -> float:
        """Exact mass of ``iv``; atoms assigned by the half-open convention."""
        dens = self.density_mass_below(iv.hi) - self.density_mass_below(iv.lo)
        return float(max(dens, 0.0) + self.atom_mass(iv))

    def measure_of_union(self, ivs: Sequence[Interval]) -> float:
        ivs = sorted(ivs, key=lambda iv: (iv.lo, iv.hi))
        for first, second in zip(ivs, ivs[1:]):
            if first.intersect(second) is not None:
                raise ValidationError(f"intervals {first} and {second} overlap")
        return float(sum(self.measure_of(iv) for iv in ivs))

    def is_lebesgue(self) -> bool:
        return (
            not self.atoms
            and np.allclose(self.c0, 1.0, atol=TOL)
            and np.allclose(self.c1, 0.0, atol=TOL)
        )

    def is_monotone(self, decreasing: bool) -> bool:
        """Strict monotonicity of the density across [0, 1].

        Every piece needs a slope of the right sign and the density may
        not jump the wrong way at a breakpoint.
        """
        if self.atoms:
            return False
        sign = -1.0 if decreasing else 1.0
        if np.any(sign * self.c1 <= 0):
            return False
        b = self.breakpoints[1:-1]
        left = self.c0[:-1] + self.c1[:-1] * b
        right = self.c0[1:] + self.c1[1:] * b
        return bool(np.all(sign * (right - left) >= -TOL))

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(v) for v in self.breakpoints],
            "pieces": [{"c0": float(a), "c1": float(b)} for a, b in zip(self.c0, self.c1)],
            "atoms": [{"at": a, "mass": m} for a, m in self.atoms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseMeasure":
        try:
            pieces = data["pieces"]
            return cls(
                data["breakpoints"],
                [p["c0"] for p in pieces],
                [p.get("c1", 0.0) for p in pieces],
                [(a["at"], a["mass"]) for a in data.get("atoms", [])],
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed measure: {exc!r}") from exc

    def __repr__(self):
        return (
            f"PiecewiseMeasure(breakpoints={self.breakpoints.tolist()}, "
            f"c0={self.c0.tolist()}, c1={self.c1.tolist()}, atoms={list(self.atoms)})"
        )


def measure_of(m: PiecewiseMeasure, iv: Interval) -> float:
    return m.measure_of(iv)


def measure_of_union(m: PiecewiseMeasure, ivs: Sequence[Interval]) -> float:
    return m.measure_of_union(ivs)


def svc_intervals(depth: int) -> list[Interval]:
    """Closed intervals left after ``depth`` rounds of the Smith-Volterra-Cantor construction.

    Round ``k`` removes a centred open interval of length ``4**-k`` from
    each of the ``2**(k-1)`` surviving intervals.
    """
    if depth < 1:
        raise ValidationError("depth must be a positive integer")
    pieces = [(0.0, 1.0)]
    for k in range(1, depth + 1):
        gap = 4.0 ** (-k)
        nxt = []
        for lo, hi in pieces:
            mid = 0.5 * (lo + hi)
            nxt.append((lo, mid - gap / 2))
            nxt.append((mid + gap / 2, hi))
        pieces = nxt
    return [Interval(lo, hi, closed=True) for lo, hi in pieces]


def svc_gaps(depth: int) -> list[Interval]:
    """The open intervals removed during the first ``depth`` rounds, sorted by position."""
    if depth < 1:
        raise ValidationError("depth must be a positive integer")
    gaps = []
    pieces = [(0.0, 1.0)]
    for k in range(1, depth + 1):
        gap = 4.0 ** (-k)
        nxt = []
        for lo, hi in pieces:
            mid = 0.5 * (lo + hi)
            gaps.append(Interval(mid - gap / 2, mid + gap / 2, closed=False))
            nxt.append((lo, mid - gap / 2))
            nxt.append((mid + gap / 2, hi))
        pieces = nxt
    return sorted(gaps, key=lambda iv: iv.lo)
