"""Function representations on [0,1].

Two concrete classes:

* `PwlFunction` -- continuous piecewise-linear with rational breakpoints and
  values.  All arithmetic is exact over `fractions.Fraction`; this is the
  ground-truth path.
* `C1Function` -- C^1 piecewise-cubic Hermite data (knots, values, slopes) in
  binary floating point.  Derived quantities (sup norms, range bounds) are
  computed from closed-form cubic extrema, so they are exact up to float
  rounding; nothing is sampled.

`CubicPieces` is the shared low-level form (power-basis coefficients per cell)
used by the certified enclosure machinery.  Piecewise-linear functions embed
into it, so sums like "PWL + C^1 bump" can be analyzed without promotion.

Promotion PWL -> C^1 (`promote_pwl`) changes the function (slopes are averaged
at interior knots); it exists only to build new C^1 test inputs and is never
applied behind the caller's back.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .intervalsets import Rat, as_fraction

__all__ = [
    "PwlFunction",
    "C1Function",
    "CubicPieces",
    "random_function",
    "random_c1_function",
    "promote_pwl",
    "function_to_json",
    "function_from_json",
]


# ---------------------------------------------------------------------------
# exact piecewise linear
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PwlFunction:
    """Continuous piecewise-linear function with exact rational data.

    The canonical domain is [0,1], but any rational subdomain of [0,1] is
    allowed because window-maximum envelopes naturally live on [0, 1-2^-a].
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.breakpoints) != len(self.values):
            raise ValueError("breakpoints and values must have equal length")
        if len(self.breakpoints) < 1:
            raise ValueError("need at least one breakpoint")
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        if self.breakpoints[0] < 0 or self.breakpoints[-1] > 1:
            raise ValueError("domain must lie inside [0,1]")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Rat, Rat]]) -> "PwlFunction":
        pts = sorted((as_fraction(x), as_fraction(v)) for x, v in pairs)
        return PwlFunction(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @staticmethod
    def constant(c: Rat, lo: Rat = 0, hi: Rat = 1) -> "PwlFunction":
        return PwlFunction.from_pairs([(lo, c), (hi, c)])

    @staticmethod
    def zero() -> "PwlFunction":
        return PwlFunction.constant(0)

    @staticmethod
    def zigzag() -> "PwlFunction":
        """The tent map: 0 at the endpoints, 1 at 1/2."""
        return PwlFunction.from_pairs([(0, 0), (Fraction(1, 2), 1), (1, 0)])

    # -- basic queries -----------------------------------------------------

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def eval(self, x: Rat) -> Fraction:
        x = as_fraction(x)
        lo, hi = self.domain
        if x < lo or x > hi:
            raise ValueError(f"{x} outside domain [{lo}, {hi}]")
        i = bisect_right(self.breakpoints, x) - 1
        if i == len(self.breakpoints) - 1:
            return self.values[-1]
        x0, x1 = self.breakpoints[i], self.breakpoints[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def __call__(self, x: Rat) -> Fraction:
        return self.eval(x)

    def sup_norm(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(
            (v1 - v0) / (x1 - x0)
            for x0, x1, v0, v1 in zip(
                self.breakpoints, self.breakpoints[1:], self.values, self.values[1:]
            )
        )

    def lipschitz_bound(self) -> Fraction:
        if len(self.breakpoints) == 1:
            return Fraction(0)
        return max(abs(s) for s in self.slopes())

    # -- arithmetic (exact) ------------------------------------------------

    def _merged_breaks(self, other: "PwlFunction") -> tuple[Fraction, ...]:
        if self.domain != other.domain:
            raise ValueError("domain mismatch")
        return tuple(sorted(set(self.breakpoints) | set(other.breakpoints)))

    def add(self, other: "PwlFunction") -> "PwlFunction":
        bks = self._merged_breaks(other)
        return PwlFunction(bks, tuple(self.eval(x) + other.eval(x) for x in bks))

    def sub(self, other: "PwlFunction") -> "PwlFunction":
        return self.add(other.scale(-1))

    def scale(self, c: Rat) -> "PwlFunction":
        c = as_fraction(c)
        return PwlFunction(self.breakpoints, tuple(c * v for v in self.values))

    def negate(self) -> "PwlFunction":
        return self.scale(-1)

    def add_linear(self, slope: Rat, intercept: Rat = 0) -> "PwlFunction":
        slope, intercept = as_fraction(slope), as_fraction(intercept)
        return PwlFunction(
            self.breakpoints,
            tuple(v + slope * x + intercept for x, v in zip(self.breakpoints, self.values)),
        )

    def reflect(self) -> "PwlFunction":
        """x -> f(1-x); requires the full domain [0,1]."""
        if self.domain != (Fraction(0), Fraction(1)):
            raise ValueError("reflect needs domain [0,1]")
        return PwlFunction(
            tuple(1 - b for b in reversed(self.breakpoints)), tuple(reversed(self.values))
        )

    def restrict(self, lo: Rat, hi: Rat) -> "PwlFunction":
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo >= hi:
            raise ValueError("empty restriction")
        bks = [lo] + [b for b in self.breakpoints if lo < b < hi] + [hi]
        return PwlFunction(tuple(bks), tuple(self.eval(x) for x in bks))

    def sup_norm_diff(self, other: "PwlFunction") -> Fraction:
        return self.sub(other).sup_norm()

    def simplify(self) -> "PwlFunction":
        """Drop interior breakpoints where the slope does not change."""
        if len(self.breakpoints) <= 2:
            return self
        bks = [self.breakpoints[0]]
        vals = [self.values[0]]
        sl = self.slopes()
        for i in range(1, len(self.breakpoints) - 1):
            if sl[i - 1] != sl[i]:
                bks.append(self.breakpoints[i])
                vals.append(self.values[i])
        bks.append(self.breakpoints[-1])
        vals.append(self.values[-1])
        return PwlFunction(tuple(bks), tuple(vals))

    # -- conversions -------------------------------------------------------

    def as_cubic_pieces(self) -> "CubicPieces":
        breaks = np.array([float(b) for b in self.breakpoints])
        coeffs = np.zeros((len(self.breakpoints) - 1, 4))
        coeffs[:, 0] = [float(v) for v in self.values[:-1]]
        coeffs[:, 1] = [float(s) for s in self.slopes()]
        return CubicPieces(breaks, coeffs)

    def sample_grid(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Float samples on a uniform n+1 point grid (for oracles and CSV)."""
        lo, hi = self.domain
        xs = np.linspace(float(lo), float(hi), n + 1)
        bx = np.array([float(b) for b in self.breakpoints])
        bv = np.array([float(v) for v in self.values])
        return xs, np.interp(xs, bx, bv)


# ---------------------------------------------------------------------------
# float piecewise cubic
# ---------------------------------------------------------------------------


def _hermite_coeffs(knots: np.ndarray, values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Power-basis coefficients per cell in the local coordinate s = x - x0."""
    h = np.diff(knots)
    v0, v1 = values[:-1], values[1:]
    m0, m1 = slopes[:-1], slopes[1:]
    d = (v1 - v0) / h
    c = np.empty((len(h), 4))
    c[:, 0] = v0
    c[:, 1] = m0
    c[:, 2] = (3.0 * d - 2.0 * m0 - m1) / h
    c[:, 3] = (m0 + m1 - 2.0 * d) / (h * h)
    return c


class C1Function:
    """C^1 piecewise-cubic Hermite interpolant on [0,1].

    members:
      knots  -- strictly increasing float array, knots[0] = 0, knots[-1] = 1
      values -- f at the knots
      slopes -- f' at the knots

    Treated as immutable; arithmetic returns new objects.  Sums are exact:
    the union of knot grids represents both addends exactly.
    """

    def __init__(self, knots: Sequence[float], values: Sequence[float], slopes: Sequence[float]):
        self.knots = np.asarray(knots, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.slopes = np.asarray(slopes, dtype=float)
        if not (len(self.knots) == len(self.values) == len(self.slopes)):
            raise ValueError("knots/values/slopes length mismatch")
        if len(self.knots) < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0:
            raise ValueError("C1Function lives on [0,1]")
        self._coeffs = _hermite_coeffs(self.knots, self.values, self.slopes)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "C1Function":
        return C1Function([0.0, 1.0], [0.0, 0.0], [0.0, 0.0])

    @staticmethod
    def linear(slope: float, intercept: float = 0.0) -> "C1Function":
        return C1Function([0.0, 1.0], [intercept, intercept + slope], [slope, slope])

    # -- evaluation --------------------------------------------------------

    def _locate(self, x: np.ndarray) -> np.ndarray:
        i = np.searchsorted(self.knots, x, side="right") - 1
        return np.clip(i, 0, len(self.knots) - 2)

    def eval(self, x) -> np.ndarray | float:
        xa = np.asarray(x, dtype=float)
        i = self._locate(np.atleast_1d(xa))
        s = np.atleast_1d(xa) - self.knots[i]
        c = self._coeffs[i]
        out = ((c[:, 3] * s + c[:, 2]) * s + c[:, 1]) * s + c[:, 0]
        return out if xa.ndim else float(out[0])

    def __call__(self, x):
        return self.eval(x)

    def deriv(self, x) -> np.ndarray | float:
        xa = np.asarray(x, dtype=float)
        i = self._locate(np.atleast_1d(xa))
        s = np.atleast_1d(xa) - self.knots[i]
        c = self._coeffs[i]
        out = (3.0 * c[:, 3] * s + 2.0 * c[:, 2]) * s + c[:, 1]
        return out if xa.ndim else float(out[0])

    # -- norms (closed-form extrema, not sampling) -------------------------

    def sup_norm(self) -> float:
        if not hasattr(self, "_sup_norm_cache"):
            p = self.as_cubic_pieces()
            lo, hi = p.range_on(0.0, 1.0)
            self._sup_norm_cache = max(abs(lo), abs(hi))
        return self._sup_norm_cache

    def deriv_sup_norm(self) -> float:
        if not hasattr(self, "_deriv_sup_norm_cache"):
            p = self.as_cubic_pieces()
            lo, hi = p.deriv_range_on(0.0, 1.0)
            self._deriv_sup_norm_cache = max(abs(lo), abs(hi))
        return self._deriv_sup_norm_cache

    def sup_norm_diff(self, other: "C1Function") -> float:
        return self.add(other.scale(-1.0)).sup_norm()

    # -- arithmetic --------------------------------------------------------

    def add(self, other: "C1Function") -> "C1Function":
        ks = np.union1d(self.knots, other.knots)
        return C1Function(
            ks,
            np.asarray(self.eval(ks)) + np.asarray(other.eval(ks)),
            np.asarray(self.deriv(ks)) + np.asarray(other.deriv(ks)),
        )

    def scale(self, c: float) -> "C1Function":
        return C1Function(self.knots, c * self.values, c * self.slopes)

    def negate(self) -> "C1Function":
        return self.scale(-1.0)

    def reflect(self) -> "C1Function":
        return C1Function(1.0 - self.knots[::-1], self.values[::-1], -self.slopes[::-1])

    def add_linear(self, slope: float, intercept: float = 0.0) -> "C1Function":
        return C1Function(
            self.knots, self.values + slope * self.knots + intercept, self.slopes + slope
        )

    def as_cubic_pieces(self) -> "CubicPieces":
        return CubicPieces(self.knots.copy(), self._coeffs.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, C1Function)
            and np.array_equal(self.knots, other.knots)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.slopes, other.slopes)
        )


# ---------------------------------------------------------------------------
# shared low-level form
# ---------------------------------------------------------------------------


def _poly_shift(c: np.ndarray, dx) -> np.ndarray:
    """Coefficients of p(dx + t) given those of p(t); c has shape (..., 4)."""
    c0, c1, c2, c3 = c[..., 0], c[..., 1], c[..., 2], c[..., 3]
    r = np.empty_like(c)
    r[..., 0] = ((c3 * dx + c2) * dx + c1) * dx + c0
    r[..., 1] = (3.0 * c3 * dx + 2.0 * c2) * dx + c1
    r[..., 2] = 3.0 * c3 * dx + c2
    r[..., 3] = c3
    return r


def _cubic_extrema_candidates(c: np.ndarray, s_lo: float, s_hi: float) -> list[float]:
    """Local s-coordinates (within [s_lo, s_hi]) where a cubic can attain its
    range: the interval ends plus real critical points."""
    cands = [s_lo, s_hi]
    c1, c2, c3 = c[1], c[2], c[3]
    a, b, cc = 3.0 * c3, 2.0 * c2, c1
    if a == 0.0:
        if b != 0.0:
            s = -cc / b
            if s_lo < s < s_hi:
                cands.append(s)
    else:
        disc = b * b - 4.0 * a * cc
        if disc >= 0.0:
            sq = np.sqrt(disc)
            for s in ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)):
                if s_lo < s < s_hi:
                    cands.append(s)
    return cands


def _eval_local(c: np.ndarray, s: float) -> float:
    return ((c[3] * s + c[2]) * s + c[1]) * s + c[0]


def _eval_local_deriv(c: np.ndarray, s: float) -> float:
    return (3.0 * c[3] * s + 2.0 * c[2]) * s + c[1]


class CubicPieces:
    """Piecewise cubic on [breaks[0], breaks[-1]], power basis per cell in the
    local coordinate s = x - breaks[i].  Continuity is the caller's business;
    sums of continuous pieces stay continuous."""

    def __init__(self, breaks: np.ndarray, coeffs: np.ndarray):
        self.breaks = np.asarray(breaks, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if len(self.breaks) != len(self.coeffs) + 1:
            raise ValueError("need one coefficient row per cell")

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breaks[0]), float(self.breaks[-1])

    def locate(self, x: float) -> int:
        i = int(np.searchsorted(self.breaks, x, side="right") - 1)
        return min(max(i, 0), len(self.coeffs) - 1)

    def eval_vec(self, xs: np.ndarray) -> np.ndarray:
        i = np.clip(np.searchsorted(self.breaks, xs, side="right") - 1, 0, len(self.coeffs) - 1)
        s = xs - self.breaks[i]
        c = self.coeffs[i]
        return ((c[:, 3] * s + c[:, 2]) * s + c[:, 1]) * s + c[:, 0]

    def eval(self, x: float) -> float:
        return float(self.eval_vec(np.array([x]))[0])

    # -- exact-in-float range bounds ---------------------------------------

    def _cells_overlapping(self, p: float, q: float) -> range:
        i = self.locate(p)
        j = self.locate(q if q > p else p)
        while j + 1 < len(self.coeffs) and self.breaks[j + 1] < q:
            j += 1  # unreachable in practice; locate(q) already lands right
        return range(i, j + 1)

    def range_on(self, p: float, q: float) -> tuple[float, float]:
        if q < p:
            raise ValueError("empty range query")
        lo = np.inf
        hi = -np.inf
        for i in self._cells_overlapping(p, q):
            a = max(p, float(self.breaks[i]))
            b = min(q, float(self.breaks[i + 1]))
            if b < a:
                continue
            c = self.coeffs[i]
            for s in _cubic_extrema_candidates(c, a - self.breaks[i], b - self.breaks[i]):
                v = _eval_local(c, s)
                lo = min(lo, v)
                hi = max(hi, v)
        return float(lo), float(hi)

    def max_on(self, p: float, q: float) -> float:
        return self.range_on(p, q)[1]

    def min_on(self, p: float, q: float) -> float:
        return self.range_on(p, q)[0]

    def argmax_on(self, p: float, q: float) -> tuple[float, float]:
        """(max value, a maximizing x)."""
        best = -np.inf
        arg = p
        for i in self._cells_overlapping(p, q):
            a = max(p, float(self.breaks[i]))
            b = min(q, float(self.breaks[i + 1]))
            if b < a:
                continue
            c = self.coeffs[i]
            for s in _cubic_extrema_candidates(c, a - self.breaks[i], b - self.breaks[i]):
                v = _eval_local(c, s)
                if v > best:
                    best, arg = v, float(self.breaks[i] + s)
        return float(best), arg

    def deriv_range_on(self, p: float, q: float) -> tuple[float, float]:
        """Range of the derivative (a quadratic per cell)."""
        lo = np.inf
        hi = -np.inf
        for i in self._cells_overlapping(p, q):
            a = max(p, float(self.breaks[i]))
            b = min(q, float(self.breaks[i + 1]))
            if b < a:
                continue
            c = self.coeffs[i]
            s_lo, s_hi = a - self.breaks[i], b - self.breaks[i]
            cands = [s_lo, s_hi]
            if c[3] != 0.0:
                s = -c[2] / (3.0 * c[3])  # vertex of the derivative parabola
                if s_lo < s < s_hi:
                    cands.append(s)
            for s in cands:
                v = _eval_local_deriv(c, s)
                lo = min(lo, v)
                hi = max(hi, v)
        return float(lo), float(hi)

    def sup_norm(self) -> float:
        lo, hi = self.range_on(*self.domain)
        return max(abs(lo), abs(hi))

    def deriv_bound(self) -> float:
        lo, hi = self.deriv_range_on(*self.domain)
        return max(abs(lo), abs(hi))

    # -- algebra -----------------------------------------------------------

    def rebase(self, new_breaks: np.ndarray) -> "CubicPieces":
        """Re-express on a finer break grid (must contain the old breaks)."""
        idx = np.clip(
            np.searchsorted(self.breaks, new_breaks[:-1], side="right") - 1,
            0,
            len(self.coeffs) - 1,
        )
        dx = new_breaks[:-1] - self.breaks[idx]
        return CubicPieces(new_breaks, _poly_shift(self.coeffs[idx], dx))

    def add(self, other: "CubicPieces") -> "CubicPieces":
        if self.domain != other.domain:
            raise ValueError("domain mismatch")
        breaks = np.union1d(self.breaks, other.breaks)
        a = self.rebase(breaks)
        b = other.rebase(breaks)
        return CubicPieces(breaks, a.coeffs + b.coeffs)

    def scale(self, c: float) -> "CubicPieces":
        return CubicPieces(self.breaks, c * self.coeffs)

    def negate(self) -> "CubicPieces":
        return self.scale(-1.0)

    def add_linear(self, slope: float, intercept: float = 0.0) -> "CubicPieces":
        coeffs = self.coeffs.copy()
        coeffs[:, 0] += slope * self.breaks[:-1] + intercept
        coeffs[:, 1] += slope
        return CubicPieces(self.breaks, coeffs)

    def reflect(self) -> "CubicPieces":
        """x -> p(1-x); requires domain [0,1]."""
        if self.domain != (0.0, 1.0):
            raise ValueError("reflect needs domain [0,1]")
        h = np.diff(self.breaks)
        # q(t) = p(h - t) on the reversed cell: shift by h, then negate odd terms
        shifted = _poly_shift(self.coeffs, h)
        shifted[:, 1] *= -1.0
        shifted[:, 3] *= -1.0
        return CubicPieces(1.0 - self.breaks[::-1], shifted[::-1])

    def restrict(self, p: float, q: float) -> "CubicPieces":
        if not (self.breaks[0] <= p < q <= self.breaks[-1]):
            raise ValueError("bad restriction")
        inner = self.breaks[(self.breaks > p) & (self.breaks < q)]
        breaks = np.concatenate(([p], inner, [q]))
        idx = np.clip(
            np.searchsorted(self.breaks, breaks[:-1], side="right") - 1, 0, len(self.coeffs) - 1
        )
        dx = breaks[:-1] - self.breaks[idx]
        return CubicPieces(breaks, _poly_shift(self.coeffs[idx], dx))


def pieces_of(f) -> CubicPieces:
    """CubicPieces view of a PwlFunction, C1Function, or CubicPieces."""
    if isinstance(f, CubicPieces):
        return f
    return f.as_cubic_pieces()


# ---------------------------------------------------------------------------
# random corpora
# ---------------------------------------------------------------------------


def random_function(
    seed: int, depth: int = 6, decay: Rat = Fraction(3, 5), amplitude: Rat = 1
) -> PwlFunction:
    """Midpoint-displacement roughness on the dyadic grid of the given depth.

    Exact rational output: displacements are dyadic rationals drawn from a
    seeded stdlib generator, scaled by decay^level.  depth 0 is a random line.
    The output is clamped into [-1, 1] range-wise only by choice of amplitude;
    no clipping is applied.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rng = random.Random(seed)
    decay = as_fraction(decay)
    amplitude = as_fraction(amplitude)

    def draw() -> Fraction:
        return Fraction(rng.getrandbits(40), 2**39) - 1  # exact dyadic in [-1, 1)

    vals: dict[Fraction, Fraction] = {
        Fraction(0): amplitude * draw(),
        Fraction(1): amplitude * draw(),
    }
    scale = amplitude
    for _ in range(depth):
        scale *= decay
        new_pts = []
        xs = sorted(vals)
        for a, b in zip(xs, xs[1:]):
            mid = (a + b) / 2
            new_pts.append((mid, (vals[a] + vals[b]) / 2 + scale * draw()))
        for x, v in new_pts:
            vals[x] = v
    xs = sorted(vals)
    return PwlFunction(tuple(xs), tuple(vals[x] for x in xs))


def random_c1_function(
    seed: int, cells: int = 6, amplitude: float = 0.5, slope_scale: float = 2.0
) -> C1Function:
    """Random smooth-ish Hermite data on a uniform grid; float path corpus."""
    rng = random.Random(seed)
    knots = np.linspace(0.0, 1.0, cells + 1)
    values = np.array([amplitude * (2.0 * rng.random() - 1.0) for _ in knots])
    slopes = np.array([slope_scale * (2.0 * rng.random() - 1.0) for _ in knots])
    return C1Function(knots, values, slopes)


def promote_pwl(f: PwlFunction, domain_check: bool = True) -> C1Function:
    """Build a C^1 function from PWL data: slope at an interior knot is the
    average of the adjacent segment slopes, one-sided at the ends.  This is a
    different function from f (used only to grow the C^1 corpus)."""
    if domain_check and f.domain != (Fraction(0), Fraction(1)):
        raise ValueError("promotion expects domain [0,1]")
    sl = [float(s) for s in f.slopes()]
    n = len(f.breakpoints)
    slopes = np.empty(n)
    slopes[0] = sl[0]
    slopes[-1] = sl[-1]
    for i in range(1, n - 1):
        slopes[i] = 0.5 * (sl[i - 1] + sl[i])
    return C1Function(
        [float(b) for b in f.breakpoints], [float(v) for v in f.values], slopes
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def function_to_json(f) -> dict:
    if isinstance(f, PwlFunction):
        return {
            "class": "pwl",
            "knots": [str(b) for b in f.breakpoints],
            "values": [str(v) for v in f.values],
        }
    if isinstance(f, C1Function):
        return {
            "class": "c1",
            "knots": [repr(float(k)) for k in f.knots],
            "values": [repr(float(v)) for v in f.values],
            "slopes": [repr(float(s)) for s in f.slopes],
        }
    raise TypeError(f"not serializable: {type(f)}")


def function_from_json(d: dict):
    cls = d.get("class")
    if cls == "pwl":
        return PwlFunction(
            tuple(Fraction(s) for s in d["knots"]), tuple(Fraction(s) for s in d["values"])
        )
    if cls == "c1":
        return C1Function(
            [float(s) for s in d["knots"]],
            [float(s) for s in d["values"]],
            [float(s) for s in d["slopes"]],
        )
    raise ValueError(f"unknown function class {cls!r}")
