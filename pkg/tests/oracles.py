"""Independent brute-force reference implementations used by the tests.

Everything here recomputes the quantities under test from their definitions,
on grids, without touching the library's exact sweep/envelope machinery: a
trailing/leading window max by block cummax (van Herk), grid membership for
the window conditions, float Hausdorff comparisons, and a witness scan for
the certified epsilon.  Deliberately simple; speed comes from numpy only.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from knotpoints.intervalsets import IntervalSet
from knotpoints.realfn import C1Function, PwlFunction

VARIANT_NAMES = ("plus_upper", "plus_lower", "minus_upper", "minus_lower")


def van_herk_max(u: np.ndarray, w: int) -> np.ndarray:
    """m[i] = max(u[i..i+w]) for i in [0, len(u)-w), via block cummax."""
    if w == 0:
        return u.copy()
    n = len(u)
    k = w + 1
    pad = (-n) % k
    up = np.concatenate([u, np.full(pad, -np.inf)])
    blocks = up.reshape(-1, k)
    pref = np.maximum.accumulate(blocks, axis=1).ravel()
    suff = np.maximum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].ravel()
    out = np.maximum(suff[: n - w], pref[w:n])
    return out


def van_herk_min(u: np.ndarray, w: int) -> np.ndarray:
    return -van_herk_max(-u, w)


def eval_float(f, xs: np.ndarray) -> np.ndarray:
    if isinstance(f, PwlFunction):
        bx = np.array([float(b) for b in f.breakpoints])
        bv = np.array([float(v) for v in f.values])
        return np.interp(xs, bx, bv)
    if isinstance(f, C1Function):
        return np.asarray(f.eval(xs), dtype=float)
    raise TypeError(f"cannot sample {type(f).__name__}")


def grid_n_set(f, a: int, variant: str, step: float = 1e-4, slack: float = 1e-9):
    """Grid members of the window condition: x and y both on the step grid.

    Returns (xs, mask) where mask[i] says the condition holds at xs[i]
    against every grid y in the window.  One-sided windows of length 2^-a;
    the window size in samples is exact because 2^-a / step is integral for
    integer a in range and step = 10^-k.
    """
    n = int(round(1.0 / step))
    xs = np.arange(n + 1) / n
    fv = eval_float(f, xs)
    width = int(round(2.0 ** (-a) / step))
    if not 0 < width <= n:
        raise ValueError("window does not fit the grid")
    if variant == "plus_upper":
        u = fv - a * xs
        cond = van_herk_max(u, width) <= u[: n + 1 - width] + slack
        return xs[: n + 1 - width], cond
    if variant == "plus_lower":
        u = fv + a * xs
        cond = van_herk_min(u, width) >= u[: n + 1 - width] - slack
        return xs[: n + 1 - width], cond
    if variant == "minus_upper":
        u = fv - a * xs
        cond = van_herk_min(u, width) >= u[width:] - slack
        return xs[width:], cond
    if variant == "minus_lower":
        u = fv + a * xs
        cond = van_herk_max(u, width) <= u[width:] + slack
        return xs[width:], cond
    raise ValueError(f"unknown variant {variant!r}")


def grid_n_set_full(f, a: int, step: float = 1e-4, slack: float = 1e-9) -> np.ndarray:
    """Grid points (on the step grid) in the union of all four variants."""
    n = int(round(1.0 / step))
    member = np.zeros(n + 1, dtype=bool)
    for variant in VARIANT_NAMES:
        xs, cond = grid_n_set(f, a, variant, step, slack)
        i0 = int(round(xs[0] * n))
        member[i0 : i0 + len(cond)] |= cond
    return np.arange(n + 1)[member] / n


def _float_bounds(iset: IntervalSet):
    lo = np.array([float(l) for l, _ in iset.intervals])
    hi = np.array([float(h) for _, h in iset.intervals])
    return lo, hi


def dist_to_interval_set(xs: np.ndarray, iset: IntervalSet) -> np.ndarray:
    """Pointwise distance to a nonempty interval set, in floats."""
    lo, hi = _float_bounds(iset)
    idx = np.searchsorted(lo, xs)
    ahead = np.where(idx < len(lo), lo[np.minimum(idx, len(lo) - 1)] - xs, np.inf)
    behind = np.where(idx > 0, xs - hi[np.maximum(idx - 1, 0)], np.inf)
    return np.maximum(0.0, np.minimum(ahead, behind))


def dist_to_points(xs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(pts, xs)
    ahead = np.where(idx < len(pts), pts[np.minimum(idx, len(pts) - 1)] - xs, np.inf)
    behind = np.where(idx > 0, xs - pts[np.maximum(idx - 1, 0)], np.inf)
    return np.minimum(np.abs(ahead), np.abs(behind))


def hausdorff_set_vs_points(iset: IntervalSet, pts: np.ndarray) -> float:
    """Hausdorff distance between an interval set and a finite float point
    set, exact up to float rounding: the distance function to a finite set is
    piecewise linear with peaks only at component endpoints and midpoints of
    consecutive points, so those candidates suffice.  Empty-set convention:
    1 against a nonempty set, 0 between two empties."""
    if iset.is_empty and len(pts) == 0:
        return 0.0
    if iset.is_empty or len(pts) == 0:
        return 1.0
    pts = np.sort(np.asarray(pts, dtype=float))
    d1 = float(np.max(dist_to_interval_set(pts, iset)))
    lo, hi = _float_bounds(iset)
    cands = [lo, hi]
    if len(pts) > 1:
        mids = 0.5 * (pts[:-1] + pts[1:])
        inside = dist_to_interval_set(mids, iset) == 0.0
        cands.append(mids[inside])
    cand = np.concatenate(cands)
    d2 = float(np.max(dist_to_points(cand, pts)))
    return max(d1, d2)


def grid_hausdorff(A: IntervalSet, B: IntervalSet, step: float = 1e-4) -> float:
    """Brute-force two-sided grid scan of the Hausdorff distance: sample each
    set on the step grid (plus its exact endpoints) and take the worst
    distance to the other set."""
    if A.is_empty and B.is_empty:
        return 0.0
    if A.is_empty or B.is_empty:
        return 1.0

    def samples(s: IntervalSet) -> np.ndarray:
        lo, hi = _float_bounds(s)
        chunks = [lo, hi]
        for l, h in zip(lo, hi):
            k = int((h - l) / step)
            if k > 0:
                chunks.append(l + step * np.arange(1, k + 1))
        return np.concatenate(chunks)

    d1 = float(np.max(dist_to_interval_set(samples(A), B)))
    d2 = float(np.max(dist_to_interval_set(samples(B), A)))
    return max(d1, d2)


def lemma_witness_scan(
    f: C1Function,
    a,
    b,
    c,
    eps: float,
    steps: int = 10,
    fail_cut: float = 1e-7,
) -> tuple[int, int]:
    """Independent scan of the witness property behind the certified eps:
    every grid x in [0, 1-2^-a] that clearly violates the scale-b forward
    condition must admit a grid y in (x+eps, x+2^-b] with
    f(y) - f(x) > c (y-x).  Returns (checked, missing)."""
    af, bf, cf = float(Fraction(a)), float(Fraction(b)), float(Fraction(c))
    win_b = 2.0 ** (-bf)
    step = eps / steps
    n = int((1.0 - 2.0 ** (-af)) / step)
    xs = step * np.arange(n + 1)
    fv = eval_float(f, xs)

    # worst forward quotient over a fine y-grid approximates the b-defect
    # from below, so "clearly failing" survives the discretization
    m = int(win_b / step)
    u = fv - bf * xs
    pad = np.concatenate([u, np.full(m, -np.inf)])
    wmax = van_herk_max(pad, m)[: n + 1]
    failing = np.nonzero(wmax - u[: n + 1] > fail_cut)[0]

    checked = len(failing)
    missing = 0
    for i in failing:
        x = xs[i]
        j0 = i + int(np.ceil((eps * (1 + 1e-12)) / step)) + 1
        j1 = min(i + m, len(xs) - 1)
        if j0 > j1:
            missing += 1
            continue
        gain = fv[j0 : j1 + 1] - fv[i] - cf * (xs[j0 : j1 + 1] - x)
        if not np.any(gain > 0.0):
            missing += 1
    return checked, missing
