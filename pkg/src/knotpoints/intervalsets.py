"""Closed subsets of [0,1] as finite unions of rational intervals.

Everything in this module is exact: endpoints are `fractions.Fraction`, set
algebra and the Hausdorff metric are computed symbolically, never sampled.
Degenerate intervals (single points) are allowed, so finite point sets embed.

Conventions
-----------
* The ambient space is I = [0,1].
* d(K, L) is the Hausdorff distance; d(K, emptyset) = 1 for nonempty K and
  d(emptyset, emptyset) = 0.
* Open balls B(A, r) around a closed set have the same interval data as their
  closures.  Inclusion checks of the form "compact inside open" are decided
  through strict margins (`subset_within`), which is exact, so no separate
  open-set representation is needed.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Union[int, float, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x: Rat) -> Fraction:
    """Exact conversion; floats convert via their binary value (lossless)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _normalize(pairs: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    items = sorted((lo, hi) for lo, hi in pairs)
    merged: list[list[Fraction]] = []
    for lo, hi in items:
        if hi < lo:
            raise ValueError(f"interval with hi < lo: [{lo}, {hi}]")
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalSet:
    """A closed subset of [0,1]: sorted, pairwise disjoint, non-adjacent closed
    intervals.  Immutable; all constructors normalize."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Rat, Rat]]) -> "IntervalSet":
        conv = [(as_fraction(a), as_fraction(b)) for a, b in pairs]
        for lo, hi in conv:
            if lo < 0 or hi > 1:
                raise ValueError(f"interval [{lo}, {hi}] leaves [0,1]")
        return IntervalSet(_normalize(conv))

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet(((ZERO, ONE),))

    @staticmethod
    def points(xs: Iterable[Rat]) -> "IntervalSet":
        return IntervalSet.from_pairs([(x, x) for x in xs])

    def __post_init__(self) -> None:
        prev: Fraction | None = None
        for lo, hi in self.intervals:
            if hi < lo:
                raise ValueError("malformed interval")
            if prev is not None and lo <= prev:
                raise ValueError("intervals not disjoint/sorted; use from_pairs")
            prev = hi

    # -- basic queries -----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def n_components(self) -> int:
        return len(self.intervals)

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def endpoints(self) -> list[Fraction]:
        out: list[Fraction] = []
        for lo, hi in self.intervals:
            out.append(lo)
            out.append(hi)
        return out

    @property
    def _lows(self) -> list[Fraction]:
        # cached sorted left endpoints; the instance is immutable
        cached = getattr(self, "_lows_cache", None)
        if cached is None:
            cached = [lo for lo, _ in self.intervals]
            object.__setattr__(self, "_lows_cache", cached)
        return cached

    def contains_point(self, x: Rat) -> bool:
        x = as_fraction(x)
        i = bisect_right(self._lows, x) - 1
        return i >= 0 and x <= self.intervals[i][1]

    def distance_to_point(self, x: Rat) -> Fraction | None:
        """dist(x, K); None when the set is empty."""
        if self.is_empty:
            return None
        x = as_fraction(x)
        i = bisect_right(self._lows, x) - 1
        best: Fraction | None = None
        if i >= 0:
            lo, hi = self.intervals[i]
            if x <= hi:
                return ZERO
            best = x - hi
        if i + 1 < len(self.intervals):
            cand = self.intervals[i + 1][0] - x
            if best is None or cand < best:
                best = cand
        return best

    # -- set algebra -------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(_normalize(self.intervals + other.intervals))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[tuple[Fraction, Fraction]] = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(_normalize(out))

    def complement_closure(self) -> "IntervalSet":
        """Closure of [0,1] minus this set.  Removing a single point removes
        nothing from the closure, so degenerate components vanish here."""
        out: list[tuple[Fraction, Fraction]] = []
        cur = ZERO
        for lo, hi in self.intervals:
            if cur < lo:
                out.append((cur, lo))
            cur = max(cur, hi)
        if cur < ONE:
            out.append((cur, ONE))
        return IntervalSet(_normalize(out))

    def complement_in_I(self) -> "IntervalSet":
        """Spec name for `complement_closure` (complement taken in I=[0,1])."""
        return self.complement_closure()

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        """Closure of self minus other."""
        return self.intersect(other.complement_closure())

    def reflect(self) -> "IntervalSet":
        """Image under x -> 1-x."""
        return IntervalSet(tuple((1 - hi, 1 - lo) for lo, hi in reversed(self.intervals)))

    def dilated(self, r: Rat) -> "IntervalSet":
        """Closed r-neighborhood clipped to [0,1]; equals ball(self, r)."""
        return ball(self, r)

    def closed_complement_of_interior(self) -> "IntervalSet":
        """[0,1] minus the interior of this set (interior taken in the
        subspace topology of [0,1], so components touching 0 or 1 are open
        there).  The result is closed: the boundary of this set survives."""
        pieces = list(self.complement_closure().intervals)
        for lo, hi in self.intervals:
            if lo == hi:
                pieces.append((lo, hi))  # a point has empty interior
            else:
                if lo != ZERO:
                    pieces.append((lo, lo))
                if hi != ONE:
                    pieces.append((hi, hi))
        return IntervalSet(_normalize(pieces))

    def subset_of_interior(self, other: "IntervalSet") -> bool:
        """self contained in the (subspace) interior of other, exactly."""
        return self.intersect(other.closed_complement_of_interior()).is_empty

    # -- metric ------------------------------------------------------------

    def _directed_sup(self, other: "IntervalSet") -> Fraction:
        """sup over x in self of dist(x, other); self, other nonempty.

        dist(., other) is piecewise linear, peaking at component endpoints of
        self or at gap midpoints of other inside self; all candidates are
        visited in one increasing sweep with a single pointer into other."""
        oiv = other.intervals
        n = len(oiv)
        sup = ZERO
        j = 0  # first component of other with upper end >= x, advanced monotonically

        def dist(x: Fraction) -> Fraction:
            nonlocal j
            while j < n and oiv[j][1] < x:
                j += 1
            if j == n:
                return x - oiv[n - 1][1]
            if oiv[j][0] <= x:
                return ZERO
            d = oiv[j][0] - x
            if j > 0:
                back = x - oiv[j - 1][1]
                if back < d:
                    d = back
            return d

        gi = 0  # pointer into the gap midpoints of other, also monotone
        for lo, hi in self.intervals:
            d = dist(lo)
            if d > sup:
                sup = d
            while gi + 1 < n and (oiv[gi][1] + oiv[gi + 1][0]) / 2 < lo:
                gi += 1
            g = gi
            while g + 1 < n:
                mid = (oiv[g][1] + oiv[g + 1][0]) / 2
                if mid > hi:
                    break
                if mid >= lo:
                    d = dist(mid)
                    if d > sup:
                        sup = d
                g += 1
            d = dist(hi)
            if d > sup:
                sup = d
        return sup

    def hausdorff(self, other: "IntervalSet") -> Fraction:
        if self.is_empty and other.is_empty:
            return ZERO
        if self.is_empty or other.is_empty:
            return ONE
        return max(self._directed_sup(other), other._directed_sup(self))

    def sup_distance_to(self, other: "IntervalSet") -> Fraction | None:
        """One-sided sup_{x in self} dist(x, other); None if undefined
        (self nonempty, other empty)."""
        if self.is_empty:
            return ZERO
        if other.is_empty:
            return None
        return self._directed_sup(other)

    def min_distance_to(self, other: "IntervalSet") -> Fraction | None:
        """min distance between the two sets; None when either is empty."""
        if self.is_empty or other.is_empty:
            return None
        best: Fraction | None = None
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                return ZERO
            d = a[i][0] - b[j][1] if a[i][0] > b[j][1] else b[j][0] - a[i][1]
            if best is None or d < best:
                best = d
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return best

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"intervals": [[str(lo), str(hi)] for lo, hi in self.intervals]}

    @staticmethod
    def from_json_dict(d: dict) -> "IntervalSet":
        return IntervalSet.from_pairs([(Fraction(a), Fraction(b)) for a, b in d["intervals"]])

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return " u ".join(
            f"{{{lo}}}" if lo == hi else f"[{lo}, {hi}]" for lo, hi in self.intervals
        )


FULL = IntervalSet.full()
EMPTY = IntervalSet.empty()


def ball(center: IntervalSet, r: Rat) -> IntervalSet:
    """Interval data of B(center, r) clipped to [0,1].  The open ball and its
    closure share this data; openness is handled by the strict checks below."""
    r = as_fraction(r)
    if r < 0:
        raise ValueError("radius must be >= 0")
    pairs = [(max(ZERO, lo - r), min(ONE, hi + r)) for lo, hi in center.intervals]
    return IntervalSet(_normalize(pairs))


def subset_within(inner: IntervalSet, outer: IntervalSet, r: Rat) -> tuple[bool, Fraction]:
    """Decide `inner` subset of the open ball B(outer, r), exactly.

    Returns (ok, margin) where margin = r - sup_{x in inner} dist(x, outer),
    the exact inclusion slack (sup convention: inner empty gives margin r).
    ok is True iff the margin is strictly positive.
    """
    r = as_fraction(r)
    if inner.is_empty:
        return True, r
    if outer.is_empty:
        return False, ZERO
    h = inner._directed_sup(outer)
    return h < r, r - h


def subset_within_closed(inner: IntervalSet, outer: IntervalSet, r: Rat) -> bool:
    """inner subset of the closed ball B-bar(outer, r)."""
    r = as_fraction(r)
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    return inner._directed_sup(outer) <= r


def is_subset(inner: IntervalSet, outer: IntervalSet) -> bool:
    """Plain containment of closed sets (radius-0 closed inclusion)."""
    j = 0
    for lo, hi in inner.intervals:
        while j < len(outer.intervals) and outer.intervals[j][1] < lo:
            j += 1
        if j >= len(outer.intervals):
            return False
        olo, ohi = outer.intervals[j]
        if not (olo <= lo and hi <= ohi):
            return False
    return True


def disjoint_gap(a: IntervalSet, b: IntervalSet) -> tuple[bool, Fraction | None]:
    """(disjoint?, gap).  gap is the positive separation when disjoint, 0 when
    they meet, None when either set is empty (vacuously disjoint)."""
    d = a.min_distance_to(b)
    if d is None:
        return True, None
    return d > 0, d


@dataclass(frozen=True)
class FinitePointSet:
    """Finite set of rational points in [0,1], sorted and distinct."""

    points: tuple[Fraction, ...]

    @staticmethod
    def of(xs: Iterable[Rat]) -> "FinitePointSet":
        raw = [as_fraction(x) for x in xs]
        if all(a < b for a, b in zip(raw, raw[1:])):
            pts = raw  # already sorted and distinct; skip hashing and sorting
        else:
            pts = sorted(set(raw))
        if pts and (pts[0] < 0 or pts[-1] > 1):
            bad = pts[0] if pts[0] < 0 else pts[-1]
            raise ValueError(f"point {bad} outside [0,1]")
        return FinitePointSet(tuple(pts))

    @property
    def is_empty(self) -> bool:
        return not self.points

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_interval_set(self) -> IntervalSet:
        cached = getattr(self, "_iset_cache", None)
        if cached is None:
            # points are sorted and distinct, so the degenerate components
            # are already in normal form
            cached = IntervalSet(tuple((p, p) for p in self.points))
            object.__setattr__(self, "_iset_cache", cached)
        return cached

    def min_gap(self) -> Fraction | None:
        """Smallest spacing between consecutive points; None when fewer than 2."""
        if len(self.points) < 2:
            return None
        return min(b - a for a, b in zip(self.points, self.points[1:]))

    def nearest(self, x: Rat) -> Fraction:
        """The point of the set closest to x (ties resolve to the left)."""
        if self.is_empty:
            raise ValueError("nearest point of an empty set")
        x = as_fraction(x)
        i = bisect_right(self.points, x)
        cands = [p for p in (self.points[i - 1] if i > 0 else None,
                             self.points[i] if i < len(self.points) else None)
                 if p is not None]
        return min(cands, key=lambda p: abs(p - x))

    def union(self, other: "FinitePointSet") -> "FinitePointSet":
        a, b = self.points, other.points
        out: list[Fraction] = []
        i = j = 0
        while i < len(a) and j < len(b):
            if a[i] < b[j]:
                out.append(a[i])
                i += 1
            elif b[j] < a[i]:
                out.append(b[j])
                j += 1
            else:
                out.append(a[i])
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return FinitePointSet(tuple(out))

    def to_json_list(self) -> list[str]:
        return [str(p) for p in self.points]

    @staticmethod
    def from_json_list(items: Sequence[str]) -> "FinitePointSet":
        return FinitePointSet.of([Fraction(s) for s in items])


def open_cover_full(points: FinitePointSet, r: Rat) -> bool:
    """Exact test that the union of OPEN balls B(p, r), p in points, covers
    [0,1]: the first point must be < r from 0, the last < r from 1, and every
    consecutive gap must be < 2r (all strict)."""
    r = as_fraction(r)
    if points.is_empty:
        return False
    pts = points.points
    if pts[0] >= r or 1 - pts[-1] >= r:
        return False
    return all(b - a < 2 * r for a, b in zip(pts, pts[1:]))


def union_of_point_sets(sets: Iterable[FinitePointSet]) -> FinitePointSet:
    merged: list[Fraction] = []
    for p in heapq.merge(*(s.points for s in sets)):
        if not merged or p != merged[-1]:
            merged.append(p)
    return FinitePointSet(tuple(merged))


def pairwise_disjoint(sets: Sequence[FinitePointSet]) -> bool:
    seen: set[Fraction] = set()
    for s in sets:
        for p in s.points:
            if p in seen:
                return False
            seen.add(p)
    return True


def prefix_distance(K: Sequence[IntervalSet], L: Sequence[IntervalSet], l: int) -> Fraction:
    """max_{n in [l]} d(K_n, L_n), the hyperspace-product gauge on prefixes."""
    if l < 1 or l > len(K) or l > len(L):
        raise ValueError("prefix length out of range")
    return max(K[n].hausdorff(L[n]) for n in range(l))
