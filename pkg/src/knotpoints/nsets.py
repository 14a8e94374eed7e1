"""Exception sets of bounded difference quotients at a fixed scale.

For a continuous f on [0,1] and a scale a > 0, write delta = 2^-a.  The four
basic sets collect points where one-sided difference quotients stay tame over
a whole window of length delta:

  plus_upper   x in [0, 1-delta] with f(y)-f(x) <=  a(y-x) for y in [x, x+delta]
  plus_lower   x in [0, 1-delta] with f(y)-f(x) >= -a(y-x) for y in [x, x+delta]
  minus_upper  x in [delta, 1]   with f(y)-f(x) >=  a(y-x) for y in [x-delta, x]
  minus_lower  x in [delta, 1]   with f(y)-f(x) <= -a(y-x) for y in [x-delta, x]

and the composites hat = plus_upper | minus_lower, check = plus_lower |
minus_upper, full = hat | check.  All are closed; a < b gives containment of
the a-set in the b-set variant by variant.

Two computation paths:

* exact (PwlFunction, integer a): the membership test collapses to a sliding
  window maximum of phi = f - a*id, which is again piecewise linear with
  constructible breakpoints; the set is the exact zero set of the slack
  M - phi >= 0.  Everything is rational arithmetic.
* certified enclosure (C1Function, real a > 0): adaptive bisection with
  window bounds from closed-form cubic extrema returns inner/outer interval
  enclosures.  Bounds are evaluated in double precision (no directed
  rounding); certification is exact up to float evaluation error, and cells
  the tests cannot decide go to the outer set only.

The scale-continuity helper `continuity_delta(a, b, eps)` returns the explicit
perturbation budget delta = eps*(b-a)/4: whenever |f-g| < delta in sup norm,
every a-variant set of f lies in the open eps-neighborhood of the matching
b-variant set of g.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .intervalsets import EMPTY, IntervalSet, Rat, as_fraction, is_subset
from .realfn import C1Function, CubicPieces, PwlFunction, pieces_of

__all__ = [
    "VARIANTS",
    "BASIC_VARIANTS",
    "NSetRequest",
    "NSetEnclosure",
    "sliding_window_max",
    "n_set_exact",
    "n_set_enclosure",
    "n_full_truncated",
    "point_defect_exact",
    "point_defect_float",
    "point_defects_float",
    "continuity_delta",
    "admissible_eps",
    "pow2_bounds",
    "pow2_gap_bounds",
    "c1_single_delta",
    "c1_continuity_delta",
    "interior_inclusion_holds",
]

BASIC_VARIANTS = ("plus_upper", "plus_lower", "minus_upper", "minus_lower")
VARIANTS = BASIC_VARIANTS + ("hat", "check", "full")

_HAT_PARTS = ("plus_upper", "minus_lower")
_CHECK_PARTS = ("plus_lower", "minus_upper")


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _as_integer_scale(a: Rat) -> int:
    af = as_fraction(a)
    if af <= 0:
        raise ValueError("scale a must be positive")
    if af.denominator != 1:
        raise ValueError(
            f"exact N-set computation needs an integer scale (2^-a rational); got a={af}"
        )
    return int(af)


# ---------------------------------------------------------------------------
# certified bounds for 2^-a with rational a
# ---------------------------------------------------------------------------


_POW2_PREC = 10**40
_POW2_BITS = 64


@functools.lru_cache(maxsize=1)
def _pow2_root_table() -> tuple[tuple[int, int], ...]:
    """Scaled-integer bounds for 2^(2^-(i+1)), i = 0.._POW2_BITS-1, by repeated
    integer square roots; entry (lo, hi) brackets the value times _POW2_PREC."""
    B = _POW2_PREC
    lo = hi = 2 * B
    table = []
    for _ in range(_POW2_BITS):
        lo = math.isqrt(lo * B)
        s = math.isqrt(hi * B)
        hi = s if s * s == hi * B else s + 1
        table.append((lo, hi))
    return tuple(table)


def _pow2_dyadic(k: int) -> tuple[int, int]:
    """Scaled-integer bounds for 2^(k/2^_POW2_BITS), 0 <= k <= 2^_POW2_BITS."""
    B = _POW2_PREC
    if k >= 1 << _POW2_BITS:
        return 2 * B, 2 * B
    table = _pow2_root_table()
    lo = hi = B
    for j in range(_POW2_BITS):
        if (k >> (_POW2_BITS - 1 - j)) & 1:
            tlo, thi = table[j]
            lo = lo * tlo // B
            hi = hi * thi // B + 1
    return lo, hi


@functools.lru_cache(maxsize=None)
def _pow2_bounds_cached(af: Fraction) -> tuple[Fraction, Fraction]:
    n = math.floor(af)
    base = Fraction(1, 2**n) if n >= 0 else Fraction(2 ** (-n))
    r = af - n
    if r == 0:
        return base, base
    B = _POW2_PREC
    k = (r.numerator << _POW2_BITS) // r.denominator
    plo, _ = _pow2_dyadic(k)
    _, phi = _pow2_dyadic(k + 1)
    # 2^-af = base / 2^r with 2^r in [plo/B, phi/B]
    return base * B / phi, base * B / plo


def pow2_bounds(a: Rat) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) bounds for 2^-a, exact when a is an integer.

    Fractional exponents are bracketed between dyadic exponents at 2^-64
    resolution, evaluated through a table of repeated certified square roots
    of 2; the enclosure is within relative width ~1e-19.
    """
    return _pow2_bounds_cached(as_fraction(a))


def pow2_gap_bounds(a: Rat, b: Rat) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) bounds for 2^-a - 2^-b, for 0 < a < b.

    Sound for any rational pair; exact when both scales are integers."""
    af, bf = as_fraction(a), as_fraction(b)
    if not 0 < af < bf:
        raise ValueError("need 0 < a < b")
    lo_a, hi_a = pow2_bounds(af)
    lo_b, hi_b = pow2_bounds(bf)
    return lo_a - hi_b, hi_a - lo_b


def continuity_delta(a: Rat, b: Rat, eps: Rat) -> Fraction:
    """Perturbation budget for scale continuity: |f-g| < delta implies that
    each a-variant set of f lies in B(matching b-variant set of g, eps).

    Requires 0 < a < b and 0 < eps < 2^-a - 2^-b (shrink eps first if needed,
    e.g. with `admissible_eps`).  Returns delta = eps*(b-a)/4, strictly inside
    the admissible range (0, eps*(b-a)/2).
    """
    af, bf, ef = as_fraction(a), as_fraction(b), as_fraction(eps)
    if not 0 < af < bf:
        raise ValueError("need 0 < a < b")
    if ef <= 0:
        raise ValueError("eps must be positive")
    gap_lb, _ = pow2_gap_bounds(af, bf)
    if ef >= gap_lb:
        # certified only below the rational lower bound; exact scales allow
        # the full range
        if af.denominator == 1 and bf.denominator == 1:
            gap = Fraction(1, 2 ** int(af)) - Fraction(1, 2 ** int(bf))
            if ef >= gap:
                raise ValueError(f"eps={ef} not below 2^-a - 2^-b = {gap}")
        else:
            raise ValueError(
                f"cannot certify eps={float(ef):.3g} < 2^-a - 2^-b "
                f"(certified lower bound {float(gap_lb):.3g}); shrink eps"
            )
    return ef * (bf - af) / 4


def admissible_eps(a: Rat, b: Rat, eps: Rat) -> Fraction:
    """Largest certified-admissible eps' <= eps for continuity_delta(a, b, .)."""
    ef = as_fraction(eps)
    gap_lb, _ = pow2_gap_bounds(a, b)
    return min(ef, gap_lb / 2)


# ---------------------------------------------------------------------------
# exact path: piecewise-linear sliding window maximum
# ---------------------------------------------------------------------------


def _line_through(x0: Fraction, y0: Fraction, x1: Fraction, y1: Fraction) -> tuple[Fraction, Fraction]:
    s = (y1 - y0) / (x1 - x0)
    return s, y0 - s * x0


def _envelope_points(
    lines: list[tuple[Fraction, Fraction]], u: Fraction, v: Fraction
) -> list[tuple[Fraction, Fraction]]:
    """Upper envelope of finitely many lines on [u,v] as (x, value) samples;
    between consecutive samples the envelope is a single line, so the samples
    describe it exactly."""
    xs = {u, v}
    for i in range(len(lines)):
        s1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            s2, c2 = lines[j]
            if s1 != s2:
                x = (c2 - c1) / (s1 - s2)
                if u < x < v:
                    xs.add(x)
    out = []
    for x in sorted(xs):
        out.append((x, max(s * x + c for s, c in lines)))
    return out


def sliding_window_max(phi: PwlFunction, delta: Rat) -> PwlFunction:
    """M(x) = max of phi over [x, x+delta], exactly, on [0, 1-delta].

    Between consecutive event points (breakpoints and breakpoints shifted left
    by delta) the window interior sees a fixed set of breakpoints, so M is the
    upper envelope of two lines (the moving endpoints) and one constant (the
    best interior breakpoint, maintained by a monotone deque).
    """
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("need 0 < delta <= 1")
    if phi.domain != (Fraction(0), Fraction(1)):
        raise ValueError("sliding_window_max expects domain [0,1]")
    xmax = 1 - delta
    if xmax == 0:
        # window is the whole domain; a PWL max is attained at a breakpoint
        return PwlFunction((Fraction(0),), (max(phi.values),))

    bks = phi.breakpoints
    events = {Fraction(0), xmax}
    for t in bks:
        if t <= xmax:
            events.add(t)
        if 0 <= t - delta <= xmax:
            events.add(t - delta)
    ev = sorted(events)

    # monotone deque of breakpoint indices with t in [v, u+delta], values
    # decreasing from the front
    from collections import deque

    dq: deque[int] = deque()
    add_ptr = 0
    samples: dict[Fraction, Fraction] = {}

    for u, v in zip(ev, ev[1:]):
        hi = u + delta
        while add_ptr < len(bks) and bks[add_ptr] <= hi:
            val = phi.values[add_ptr]
            while dq and phi.values[dq[-1]] <= val:
                dq.pop()
            dq.append(add_ptr)
            add_ptr += 1
        while dq and bks[dq[0]] < v:
            dq.popleft()

        lines = [
            _line_through(u, phi.eval(u), v, phi.eval(v)),
            _line_through(u, phi.eval(u + delta), v, phi.eval(v + delta)),
        ]
        if dq:
            lines.append((Fraction(0), phi.values[dq[0]]))
        for x, val in _envelope_points(lines, u, v):
            prev = samples.get(x)
            if prev is not None and prev != val:
                raise AssertionError("window max envelope mismatch at cell boundary")
            samples[x] = val

    xs = sorted(samples)
    return PwlFunction(tuple(xs), tuple(samples[x] for x in xs)).simplify()


def _zero_set(d: PwlFunction) -> IntervalSet:
    """Zero set of a nonnegative piecewise-linear function, exactly: whole
    segments where it vanishes identically plus isolated endpoint zeros."""
    pairs: list[tuple[Fraction, Fraction]] = []
    bks, vals = d.breakpoints, d.values
    if len(bks) == 1:
        return IntervalSet.points([bks[0]]) if vals[0] == 0 else EMPTY
    for i in range(len(bks) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 < 0 or v1 < 0:
            raise AssertionError("window-max slack went negative; internal error")
        if v0 == 0 and v1 == 0:
            pairs.append((bks[i], bks[i + 1]))
        elif v0 == 0:
            pairs.append((bks[i], bks[i]))
        elif v1 == 0:
            pairs.append((bks[i + 1], bks[i + 1]))
    return IntervalSet.from_pairs(pairs)


def _plus_upper_exact(f: PwlFunction, a: int) -> IntervalSet:
    delta = Fraction(1, 2**a)
    phi = f.add_linear(-a)
    m = sliding_window_max(phi, delta)
    if 1 - delta == 0:
        return IntervalSet.points([0]) if m.values[0] == phi.values[0] else EMPTY
    d = m.sub(phi.restrict(0, 1 - delta))
    return _zero_set(d)


def n_set_exact(f: PwlFunction, a: Rat, variant: str = "full") -> IntervalSet:
    """Exact exception set for a piecewise-linear f and integer scale a.

    The three non-plus_upper basics come from two involutions: negating f
    swaps the upper/lower slope bound, reflecting x swaps forward/backward
    windows:

      plus_lower(f,a)  = plus_upper(-f, a)
      minus_lower(f,a) = reflect(plus_upper(reflect(f), a))
      minus_upper(f,a) = reflect(plus_upper(-reflect(f), a))
    """
    if not isinstance(f, PwlFunction):
        raise TypeError("n_set_exact needs a PwlFunction; use n_set_enclosure for C1")
    _check_variant(variant)
    if variant == "hat":
        return n_set_exact(f, a, "plus_upper").union(n_set_exact(f, a, "minus_lower"))
    if variant == "check":
        return n_set_exact(f, a, "plus_lower").union(n_set_exact(f, a, "minus_upper"))
    if variant == "full":
        return n_set_exact(f, a, "hat").union(n_set_exact(f, a, "check"))
    ai = _as_integer_scale(a)
    if variant == "plus_upper":
        return _plus_upper_exact(f, ai)
    if variant == "plus_lower":
        return _plus_upper_exact(f.negate(), ai)
    if variant == "minus_lower":
        return _plus_upper_exact(f.reflect(), ai).reflect()
    return _plus_upper_exact(f.reflect().negate(), ai).reflect()  # minus_upper


def n_full_truncated(f: PwlFunction, a_list: Sequence[Rat]) -> IntervalSet:
    """Union of full exception sets over an increasing list of scales."""
    fracs = [as_fraction(a) for a in a_list]
    for x, y in zip(fracs, fracs[1:]):
        if not x < y:
            raise ValueError("a_list must be strictly increasing")
    out = EMPTY
    for a in fracs:
        out = out.union(n_set_exact(f, a, "full"))
    return out


# ---------------------------------------------------------------------------
# pointwise membership defects
# ---------------------------------------------------------------------------


def _window_extrema_exact(f: PwlFunction, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    cands = [f.eval(lo), f.eval(hi)]
    for t, v in zip(f.breakpoints, f.values):
        if lo < t < hi:
            cands.append(v)
    return min(cands), max(cands)


def point_defect_exact(f: PwlFunction, a: Rat, variant: str, x: Rat) -> Fraction | None:
    """Exact membership defect at a point: 0 means x is in the variant set,
    positive quantifies the worst violation, None means x is outside the
    variant's domain.  Composites take the best defect of their parts."""
    _check_variant(variant)
    if variant in ("hat", "check", "full"):
        parts = {"hat": _HAT_PARTS, "check": _CHECK_PARTS, "full": BASIC_VARIANTS}[variant]
        defs = [point_defect_exact(f, a, p, x) for p in parts]
        defs = [d for d in defs if d is not None]
        return min(defs) if defs else None
    ai = _as_integer_scale(a)
    delta = Fraction(1, 2**ai)
    xf = as_fraction(x)
    if variant.startswith("plus"):
        if not 0 <= xf <= 1 - delta:
            return None
        lo, hi = xf, xf + delta
    else:
        if not delta <= xf <= 1:
            return None
        lo, hi = xf - delta, xf
    if variant in ("plus_upper", "minus_upper"):
        g = f.add_linear(-ai)
    else:
        g = f.add_linear(ai)
    mn, mx = _window_extrema_exact(g, lo, hi)
    gx = g.eval(xf)
    if variant in ("plus_upper", "minus_lower"):
        return mx - gx  # need window max <= value at x
    return gx - mn  # need window min >= value at x


def point_defect_float(f, a: float, variant: str, x: float) -> float:
    """Float membership defect (closed-form window extrema on cubic pieces).
    Returns +inf outside the variant's domain; composites take the minimum."""
    _check_variant(variant)
    if variant in ("hat", "check", "full"):
        parts = {"hat": _HAT_PARTS, "check": _CHECK_PARTS, "full": BASIC_VARIANTS}[variant]
        return min(point_defect_float(f, a, p, x) for p in parts)
    p = pieces_of(f)
    delta = 2.0 ** (-float(a))
    tolredge = 1e-12
    if variant.startswith("plus"):
        if not -tolredge <= x <= 1 - delta + tolredge:
            return np.inf
        lo, hi = x, min(x + delta, 1.0)
    else:
        if not delta - tolredge <= x <= 1 + tolredge:
            return np.inf
        lo, hi = max(x - delta, 0.0), x
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    sign = -1.0 if variant in ("plus_upper", "minus_upper") else 1.0
    g = p.add_linear(sign * float(a))
    gx = g.eval(min(max(x, 0.0), 1.0))
    mn, mx = g.range_on(lo, hi)
    if variant in ("plus_upper", "minus_lower"):
        return mx - gx
    return gx - mn


def point_defects_float(f, a: float, variant: str, xs) -> np.ndarray:
    """Vectorized point_defect_float over an array of points.

    Every basic variant is the forward-upper defect of a transformed function
    at a transformed point, so one segment table per variant serves all the
    queries at once.
    """
    _check_variant(variant)
    xs = np.asarray(xs, dtype=float)
    if variant in ("hat", "check", "full"):
        parts = {"hat": _HAT_PARTS, "check": _CHECK_PARTS, "full": BASIC_VARIANTS}[variant]
        return np.minimum.reduce([point_defects_float(f, a, p, xs) for p in parts])
    p = pieces_of(f)
    af = float(a)
    delta = 2.0 ** (-af)
    if delta >= 1.0:
        raise ValueError("window 2^-a must be smaller than the domain")
    if variant == "plus_upper":
        q, ts = p, xs
    elif variant == "plus_lower":
        q, ts = p.negate(), xs
    elif variant == "minus_lower":
        q, ts = p.reflect(), 1.0 - xs
    else:
        q, ts = p.reflect().negate(), 1.0 - xs
    phi = q.add_linear(-af)
    tab = _PhiTables(phi, delta / 2.0, 1.0 - delta)
    out = np.full(xs.shape, np.inf, dtype=float)
    tolredge = 1e-12
    ok = (ts >= -tolredge) & (ts <= 1.0 - delta + tolredge)
    if ok.any():
        v = np.clip(ts[ok], 0.0, 1.0)
        out[ok] = tab.window_upper(v, delta) - phi.eval_vec(v)
    return out


# ---------------------------------------------------------------------------
# certified enclosures for C1 functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NSetEnclosure:
    """Certified bracket: inner is provably inside the true set, the true set
    is provably inside outer.  Both are stored exactly (float endpoints are
    rationals).  undecided_length is the measure of outer minus inner."""

    inner: IntervalSet
    outer: IntervalSet
    tolerance: float
    undecided_length: Fraction
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not is_subset(self.inner, self.outer):
            raise ValueError("enclosure inner not contained in outer")

    @staticmethod
    def exact(s: IntervalSet) -> "NSetEnclosure":
        return NSetEnclosure(s, s, 0.0, Fraction(0), {"exact": True})

    def union(self, other: "NSetEnclosure") -> "NSetEnclosure":
        inner = self.inner.union(other.inner)
        outer = self.outer.union(other.outer)
        return NSetEnclosure(
            inner,
            outer,
            max(self.tolerance, other.tolerance),
            outer.measure() - inner.measure(),
            {"union": True},
        )

    def reflect(self) -> "NSetEnclosure":
        return NSetEnclosure(
            self.inner.reflect(),
            self.outer.reflect(),
            self.tolerance,
            self.undecided_length,
            dict(self.stats),
        )


@dataclass(frozen=True)
class NSetRequest:
    """Bundled query: which variant of which function at which scale."""

    f: object
    a: Rat
    variant: str = "full"

    def __post_init__(self) -> None:
        _check_variant(self.variant)
        if as_fraction(self.a) <= 0:
            raise ValueError("scale a must be positive")

    def exact(self) -> IntervalSet:
        return n_set_exact(self.f, self.a, self.variant)

    def enclosure(self, tol: float) -> NSetEnclosure:
        return n_set_enclosure(self.f, self.a, self.variant, tol)


def _ev_cubic(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    return ((c[:, 3] * s + c[:, 2]) * s + c[:, 1]) * s + c[:, 0]


def _cubic_max_vec(c: np.ndarray, s_lo: np.ndarray, s_hi: np.ndarray) -> np.ndarray:
    out = np.maximum(_ev_cubic(c, s_lo), _ev_cubic(c, s_hi))
    c1, c2, c3 = c[:, 1], c[:, 2], c[:, 3]
    qa, qb = 3.0 * c3, 2.0 * c2
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = np.where((qa == 0.0) & (qb != 0.0), -c1 / np.where(qb == 0.0, 1.0, qb), np.nan)
        disc = qb * qb - 4.0 * qa * c1
        good = (qa != 0.0) & (disc >= 0.0)
        sq = np.sqrt(np.where(disc < 0.0, 0.0, disc))
        den = 2.0 * np.where(qa == 0.0, 1.0, qa)
        r1 = np.where(good, (-qb - sq) / den, np.nan)
        r2 = np.where(good, (-qb + sq) / den, np.nan)
    for r in (lin, r1, r2):
        ok = np.isfinite(r) & (r > s_lo) & (r < s_hi)
        if ok.any():
            out[ok] = np.maximum(out[ok], _ev_cubic(c[ok], r[ok]))
    return out


def _cubic_min_vec(c: np.ndarray, s_lo: np.ndarray, s_hi: np.ndarray) -> np.ndarray:
    return -_cubic_max_vec(-c, s_lo, s_hi)


def _deriv_max_vec(c: np.ndarray, s_lo: np.ndarray, s_hi: np.ndarray) -> np.ndarray:
    def d(s):
        return (3.0 * c[:, 3] * s + 2.0 * c[:, 2]) * s + c[:, 1]

    out = np.maximum(d(s_lo), d(s_hi))
    c3 = c[:, 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        vert = np.where(c3 != 0.0, -c[:, 2] / (3.0 * np.where(c3 == 0.0, 1.0, c3)), np.nan)
    ok = np.isfinite(vert) & (vert > s_lo) & (vert < s_hi)
    if ok.any():
        vv = vert[ok]
        out[ok] = np.maximum(out[ok], (3.0 * c[ok, 3] * vv + 2.0 * c[ok, 2]) * vv + c[ok, 1])
    return out


class _RangeMax:
    """Sparse table for vectorized range-maximum queries over a float array."""

    def __init__(self, values: np.ndarray):
        self.levels = [np.asarray(values, dtype=float)]
        k = 1
        while 2 * k <= len(values):
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-k], prev[k:]))
            k *= 2

    def query(self, i: np.ndarray, j: np.ndarray, empty: float = -np.inf) -> np.ndarray:
        """max over [i, j) per entry; empty ranges give `empty`."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        out = np.full(i.shape, empty, dtype=float)
        n = j - i
        ok = n > 0
        if not ok.any():
            return out
        ks = (np.frexp(n[ok].astype(float))[1] - 1).astype(np.int64)
        ii, jj = i[ok], j[ok]
        res = np.empty(ii.shape, dtype=float)
        for kv in np.unique(ks):
            m = ks == kv
            lev = self.levels[int(kv)]
            res[m] = np.maximum(lev[ii[m]], lev[jj[m] - (1 << int(kv))])
        out[ok] = res
        return out


class _PhiTables:
    """Knot-aligned segment grid over [0,1] for phi, with per-segment range
    data and sparse tables for window queries."""

    def __init__(self, phi: CubicPieces, step: float, xmax: float):
        pts = np.union1d(phi.breaks, np.linspace(0.0, 1.0, int(np.ceil(1.0 / step)) + 1))
        pts = np.union1d(pts, np.array([xmax]))
        self.grid = pts
        n_seg = len(pts) - 1
        self.cell = np.clip(
            np.searchsorted(phi.breaks, pts[:-1], side="right") - 1, 0, len(phi.coeffs) - 1
        )
        self.kleft = phi.breaks[self.cell]
        self.coeffs = phi.coeffs
        c = phi.coeffs[self.cell]
        s_lo = pts[:-1] - self.kleft
        s_hi = pts[1:] - self.kleft
        self.segmax = _cubic_max_vec(c, s_lo, s_hi)
        self.segmin = _cubic_min_vec(c, s_lo, s_hi)
        self.dermax = _deriv_max_vec(c, s_lo, s_hi)
        self.gridvals = phi.eval_vec(pts)
        self.rmq_segmax = _RangeMax(self.segmax)
        self.rmq_gridvals = _RangeMax(self.gridvals)
        self.n_seg = n_seg
        self.phi = phi

    def seg_of(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, self.n_seg - 1)

    def range_upper(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Max of phi over [lo, hi] per entry (exact per-segment closed forms)."""
        i_l = self.seg_of(lo)
        ilast = np.searchsorted(self.grid, hi, side="right") - 1
        left_hi = np.minimum(self.grid[i_l + 1], hi)
        kl = self.kleft[i_l]
        ub = _cubic_max_vec(self.coeffs[self.cell[i_l]], lo - kl, left_hi - kl)
        mid = self.rmq_segmax.query(i_l + 1, np.minimum(ilast, self.n_seg))
        ub = np.maximum(ub, mid)
        ic = np.minimum(ilast, self.n_seg - 1)
        has_right = (ilast > i_l) & (ilast <= self.n_seg - 1) & (self.grid[ic] < hi)
        if has_right.any():
            idx = ic[has_right]
            kr = self.kleft[idx]
            val = _cubic_max_vec(
                self.coeffs[self.cell[idx]], self.grid[idx] - kr, hi[has_right] - kr
            )
            ub[has_right] = np.maximum(ub[has_right], val)
        return ub

    def deriv_upper(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Max of phi' over [lo, hi] per entry."""
        if not hasattr(self, "rmq_dermax"):
            self.rmq_dermax = _RangeMax(self.dermax)
        i_l = self.seg_of(lo)
        ilast = np.searchsorted(self.grid, hi, side="right") - 1
        left_hi = np.minimum(self.grid[i_l + 1], hi)
        kl = self.kleft[i_l]
        ub = _deriv_max_vec(self.coeffs[self.cell[i_l]], lo - kl, left_hi - kl)
        mid = self.rmq_dermax.query(i_l + 1, np.minimum(ilast, self.n_seg))
        ub = np.maximum(ub, mid)
        ic = np.minimum(ilast, self.n_seg - 1)
        has_right = (ilast > i_l) & (ilast <= self.n_seg - 1) & (self.grid[ic] < hi)
        if has_right.any():
            idx = ic[has_right]
            kr = self.kleft[idx]
            val = _deriv_max_vec(
                self.coeffs[self.cell[idx]], self.grid[idx] - kr, hi[has_right] - kr
            )
            ub[has_right] = np.maximum(ub[has_right], val)
        return ub

    def window_upper(self, v: np.ndarray, delta: float) -> np.ndarray:
        """Upper bound for max phi over [v, v+delta] (window clipped to 1)."""
        return self.range_upper(v, np.minimum(v + delta, 1.0))

    def witness_lower(self, v: np.ndarray, right: np.ndarray) -> np.ndarray:
        """A true value of phi attained somewhere in [v, right]: the best of
        the grid values inside plus the two endpoint evaluations."""
        iv = np.searchsorted(self.grid, v, side="left")
        iw = np.searchsorted(self.grid, right, side="right")
        w = self.rmq_gridvals.query(iv, iw)
        ends = np.maximum(self.phi.eval_vec(v), self.phi.eval_vec(np.minimum(right, 1.0)))
        return np.maximum(w, ends)


def _classify(
    tab: _PhiTables,
    u: np.ndarray,
    v: np.ndarray,
    seg: np.ndarray,
    delta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """(inside, outside) certificates for cells [u,v], each within segment seg."""
    kl = tab.kleft[seg]
    c = tab.coeffs[tab.cell[seg]]
    s_lo, s_hi = u - kl, v - kl
    der = _deriv_max_vec(c, s_lo, s_hi)
    lbmin = _cubic_min_vec(c, s_lo, s_hi)
    ub_win = tab.window_upper(v, delta)
    inside = (der <= 0.0) & (ub_win <= lbmin)
    ubmax = _cubic_max_vec(c, s_lo, s_hi)
    witness = tab.witness_lower(v, u + delta)
    # a strictly positive slope throughout the cell also rules every point
    # out: phi keeps growing just to the right, inside the window
    dermin = -_deriv_max_vec(-c, s_lo, s_hi)
    outside = (witness > ubmax) | (dermin > 0.0)
    return inside, outside & ~inside


_MAX_SEGMENTS = 400_000
_WIDTH_FLOOR = 1e-12


def _enclosure_plus_upper_c1(
    f: C1Function, a: float, tol: float
) -> tuple[list, list, dict]:
    """Inside cells and undecided cells (float pairs) for the forward-upper
    set of a C1 function, via two-phase certified bisection."""
    delta = 2.0 ** (-a)
    if delta == 0.0:
        raise ValueError(f"window 2^-a underflows to zero at a={a}")
    xmax = 1.0 - delta
    if xmax <= 0.0:
        raise ValueError("window 2^-a must be smaller than the domain")
    phi = f.as_cubic_pieces().add_linear(-a)
    step = min(tol, delta / 2.0)
    if 1.0 / step > _MAX_SEGMENTS:
        raise ValueError(
            f"enclosure grid would need {1.0/step:.3g} segments (cap {_MAX_SEGMENTS}); "
            "scale or tolerance out of the float-certified range"
        )
    tab = _PhiTables(phi, step, xmax)
    grid = tab.grid
    n_cells = int(np.searchsorted(grid, xmax, side="left"))
    u = grid[:n_cells].copy()
    v = grid[1 : n_cells + 1].copy()
    seg = np.arange(n_cells)

    inside, outside = _classify(tab, u, v, seg, delta)
    undecided = ~inside & ~outside
    inside_cells = list(zip(u[inside], v[inside]))
    stats = {"phase1_cells": n_cells, "undecided_phase1": int(undecided.sum())}

    u, v, seg = u[undecided], v[undecided], seg[undecided]
    depth = 0
    while len(u) and depth < 60:
        width = float(np.max(v - u))
        if width <= _WIDTH_FLOOR:
            break
        mid = 0.5 * (u + v)
        uu = np.concatenate([u, mid])
        vv = np.concatenate([mid, v])
        ss = np.concatenate([seg, seg])
        inside, outside = _classify(tab, uu, vv, ss, delta)
        inside_cells.extend(zip(uu[inside], vv[inside]))
        keep = ~inside & ~outside
        u, v, seg = uu[keep], vv[keep], ss[keep]
        depth += 1

    stats["max_depth"] = depth
    stats["undecided_final"] = len(u)
    return inside_cells, list(zip(u, v)), stats


def _merge_float_cells(cells: list) -> IntervalSet:
    if not cells:
        return EMPTY
    cells = sorted((float(a), float(b)) for a, b in cells)
    merged = [list(cells[0])]
    for lo, hi in cells[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    # merged is sorted with strict gaps, so the normal form is direct
    return IntervalSet(
        tuple((Fraction(max(lo, 0.0)), Fraction(min(hi, 1.0))) for lo, hi in merged)
    )


def _full_domain_enclosure(a: Rat, forward: bool) -> NSetEnclosure:
    lo2a, hi2a = pow2_bounds(a)
    if forward:
        inner = IntervalSet.from_pairs([(0, 1 - hi2a)])
        outer = IntervalSet.from_pairs([(0, 1 - lo2a)])
    else:
        inner = IntervalSet.from_pairs([(hi2a, 1)])
        outer = IntervalSet.from_pairs([(lo2a, 1)])
    return NSetEnclosure(
        inner, outer, 0.0, outer.measure() - inner.measure(), {"shortcut": True}
    )


def n_set_enclosure(f, a: Rat, variant: str = "full", tol: float = 1e-4) -> NSetEnclosure:
    """Certified inner/outer enclosure of the variant set at scale a.

    PwlFunction input with integer a routes to the exact path (inner = outer).
    For C1 input: when the derivative bound is provably at most a, every
    variant fills its whole domain and the enclosure is immediate; otherwise
    the bisection engine runs on the forward-upper reduction, with the same
    two involutions as the exact path mapping the result to other variants.
    """
    _check_variant(variant)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(f, PwlFunction):
        if as_fraction(a).denominator == 1:
            return NSetEnclosure.exact(n_set_exact(f, a, variant))
        if f.lipschitz_bound() <= as_fraction(a):
            # every slope is within the cone, so each part fills its domain
            parts = {"hat": _HAT_PARTS, "check": _CHECK_PARTS, "full": BASIC_VARIANTS}.get(
                variant, (variant,)
            )
            out = _full_domain_enclosure(a, forward=parts[0].startswith("plus"))
            for p in parts[1:]:
                out = out.union(_full_domain_enclosure(a, forward=p.startswith("plus")))
            return out
        raise ValueError(
            "piecewise-linear enclosures need an integer scale when the "
            f"slope bound exceeds the scale; got a={as_fraction(a)} with "
            f"slope bound {f.lipschitz_bound()}"
        )
    if not isinstance(f, C1Function):
        raise TypeError("n_set_enclosure needs a PwlFunction or C1Function")
    if variant in ("hat", "check", "full"):
        parts = {"hat": _HAT_PARTS, "check": _CHECK_PARTS, "full": BASIC_VARIANTS}[variant]
        out = n_set_enclosure(f, a, parts[0], tol)
        for p in parts[1:]:
            out = out.union(n_set_enclosure(f, a, p, tol))
        return out

    af = float(as_fraction(a))
    if f.deriv_sup_norm() <= af - 1e-9:
        return _full_domain_enclosure(a, forward=variant.startswith("plus"))

    if variant == "plus_upper":
        g, refl = f, False
    elif variant == "plus_lower":
        g, refl = f.negate(), False
    elif variant == "minus_lower":
        g, refl = f.reflect(), True
    else:  # minus_upper
        g, refl = f.reflect().negate(), True
    inside, undecided, stats = _enclosure_plus_upper_c1(g, af, tol)
    inner = _merge_float_cells(inside)
    outer = _merge_float_cells(inside + undecided)
    enc = NSetEnclosure(inner, outer, tol, outer.measure() - inner.measure(), stats)
    return enc.reflect() if refl else enc


# ---------------------------------------------------------------------------
# single-function scale comparisons (C1)
# ---------------------------------------------------------------------------


def _tilde_enclosures(f: C1Function, a: Rat, tol: float) -> dict[str, NSetEnclosure]:
    return {
        "hat": n_set_enclosure(f, a, "hat", tol),
        "check": n_set_enclosure(f, a, "check", tol),
    }


def interior_inclusion_holds(f: C1Function, a: Rat, b: Rat, tol: float = 1e-4) -> bool:
    """Certified check that each tilde reading at scale a sits inside the
    interior (relative to [0,1]) of the same reading at scale b."""
    ea = _tilde_enclosures(f, a, tol)
    eb = _tilde_enclosures(f, b, tol)
    return all(ea[r].outer.subset_of_interior(eb[r].inner) for r in ("hat", "check"))


def c1_single_delta(f: C1Function, a: Rat, b: Rat, tol: float = 1e-4) -> Fraction | None:
    """A certified radius delta with B(tilde set at a, delta) inside the tilde
    set at b, for both readings; None when the enclosures cannot separate at
    this tolerance."""
    best: Fraction | None = None
    ea = _tilde_enclosures(f, a, tol)
    eb = _tilde_enclosures(f, b, tol)
    for r in ("hat", "check"):
        comp = eb[r].inner.complement_closure()
        if comp.is_empty:
            cand = Fraction(1, 4)
        else:
            if ea[r].outer.is_empty:
                cand = Fraction(1, 4)
            else:
                sep = ea[r].outer.min_distance_to(comp)
                if sep is None or sep <= 0:
                    return None
                cand = sep / 2
        best = cand if best is None else min(best, cand)
    return best


def c1_continuity_delta(f: C1Function, a: Rat, b: Rat, tol: float = 1e-4) -> Fraction | None:
    """A certified delta such that for every g with |g-f| < delta, the
    a-scale tilde sets of g lie delta-deep inside the b-scale tilde sets of f
    (the two-function comparison built from the single-function radius and
    scale continuity at the midpoint c = (a+b)/2)."""
    af, bf = as_fraction(a), as_fraction(b)
    c = (af + bf) / 2
    two_eps = c1_single_delta(f, c, bf, tol)
    if two_eps is None:
        return None
    eps = admissible_eps(af, c, two_eps / 2)
    if eps <= 0:
        return None
    tau = continuity_delta(af, c, eps)
    return min(eps, tau)
