"""Exception sets: certified power-of-two brackets, the exact sliding-window
path for piecewise-linear functions, certified C1 enclosures, and the scale
continuity helpers."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotpoints.intervalsets import EMPTY, FULL, IntervalSet, ball, is_subset, subset_within
from knotpoints.nsets import (
    BASIC_VARIANTS,
    NSetEnclosure,
    admissible_eps,
    c1_continuity_delta,
    c1_single_delta,
    continuity_delta,
    interior_inclusion_holds,
    n_full_truncated,
    n_set_enclosure,
    n_set_exact,
    point_defect_exact,
    point_defect_float,
    point_defects_float,
    pow2_bounds,
    pow2_gap_bounds,
    sliding_window_max,
)
from knotpoints.realfn import C1Function, PwlFunction, random_c1_function, random_function
from oracles import grid_n_set, grid_n_set_full, hausdorff_set_vs_points

F = Fraction


# -- certified 2^-a brackets ------------------------------------------------


def test_pow2_bounds_exact_for_integers():
    for a in (1, 2, 3, 10):
        lo, hi = pow2_bounds(a)
        assert lo == hi == F(1, 2 ** a)


@given(st.integers(1, 40), st.integers(2, 12))
@settings(max_examples=60)
def test_pow2_bounds_bracket_the_true_value(p, q):
    """lo <= 2^(-p/q) <= hi, checked exactly by raising to the q-th power."""
    a = F(p, q)
    lo, hi = pow2_bounds(a)
    assert 0 < lo <= hi
    assert lo ** q <= F(1, 2 ** p) <= hi ** q
    assert (hi - lo) / lo < Fraction(1, 10 ** 18)


def test_pow2_bounds_whole_exponents_outside_unit_range():
    assert pow2_bounds(0) == (F(1), F(1))
    assert pow2_bounds(-1) == (F(2), F(2))


def test_pow2_gap_bounds_integer_exact():
    lo, hi = pow2_gap_bounds(1, 2)
    assert lo == hi == F(1, 4)


def test_pow2_gap_bounds_fractional_frozen():
    lo, hi = pow2_gap_bounds(1.295, 1.369)
    assert float(lo) == pytest.approx(0.020376652274702457, rel=1e-14)
    assert 0 < hi - lo < Fraction(1, 10 ** 18)


def test_pow2_gap_bounds_requires_order():
    with pytest.raises(ValueError):
        pow2_gap_bounds(2, 1)


def test_mean_value_bound_on_gaps():
    """|2^-a - 2^-b| <= |a-b| log 2 for positive scales."""
    rng = np.random.default_rng(0)
    a = rng.uniform(0.05, 20.0, 2000)
    b = rng.uniform(0.05, 20.0, 2000)
    lhs = np.abs(2.0 ** -a - 2.0 ** -b)
    assert np.all(lhs <= np.abs(a - b) * np.log(2.0) + 1e-12)


# -- scale continuity budget ------------------------------------------------


def test_continuity_delta_example():
    assert continuity_delta(1, 2, F(1, 10)) == F(1, 40)


def test_continuity_delta_rejects_large_eps():
    with pytest.raises(ValueError):
        continuity_delta(1, 2, F(1, 4))
    with pytest.raises(ValueError):
        continuity_delta(1, 2, F(3, 10))


def test_continuity_delta_fractional_scales():
    d = continuity_delta(F(3, 2), F(5, 2), F(1, 10))
    assert d == F(1, 10) * 1 / 4
    with pytest.raises(ValueError):
        continuity_delta(F(3, 2), F(5, 2), F(1, 5))  # above the certified gap


def test_admissible_eps():
    assert admissible_eps(1, 2, F(1, 2)) == F(1, 8)
    assert admissible_eps(1, 2, F(1, 100)) == F(1, 100)


# -- exact sliding-window maximum -------------------------------------------


def test_sliding_window_max_zigzag_quarter():
    m = sliding_window_max(PwlFunction.zigzag(), F(1, 4))
    expect = PwlFunction.from_pairs(
        [(0, F(1, 2)), (F(1, 4), 1), (F(1, 2), 1), (F(3, 4), F(1, 2))]
    )
    assert m.domain == (F(0), F(3, 4))
    assert m.sup_norm_diff(expect) == 0


def test_sliding_window_max_constant():
    m = sliding_window_max(PwlFunction.constant(F(2, 7)), F(1, 2))
    assert m.sup_norm_diff(PwlFunction.constant(F(2, 7), 0, F(1, 2))) == 0


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
@settings(max_examples=20, deadline=None)
def test_sliding_window_max_dominates_grid(seed, a):
    """M(x) is the true window max: at grid x it dominates the grid-sampled
    window max and exceeds it by at most one Lipschitz step."""
    f = random_function(seed=seed, depth=5)
    delta = F(1, 2 ** a)
    m = sliding_window_max(f, delta)
    L = float(f.lipschitz_bound())
    step = F(1, 512)
    width = int(delta / step)
    xs = [step * i for i in range(512 - width + 1)]
    for i in range(0, len(xs), 37):
        x = xs[i]
        grid_max = max(f(x + step * t) for t in range(width + 1))
        assert m(x) >= grid_max
        assert float(m(x)) <= float(grid_max) + L * float(step) + 1e-12


# -- exact N-sets: frozen examples ------------------------------------------


def test_zero_function_sets_scale_one():
    z = PwlFunction.zero()
    assert n_set_exact(z, 1, "plus_upper") == IntervalSet.from_pairs([(0, F(1, 2))])
    assert n_set_exact(z, 1, "plus_lower") == IntervalSet.from_pairs([(0, F(1, 2))])
    assert n_set_exact(z, 1, "minus_upper") == IntervalSet.from_pairs([(F(1, 2), 1)])
    assert n_set_exact(z, 1, "minus_lower") == IntervalSet.from_pairs([(F(1, 2), 1)])
    assert n_set_exact(z, 1, "hat") == FULL
    assert n_set_exact(z, 1, "check") == FULL
    assert n_set_exact(z, 1, "full") == FULL


def test_zigzag_sets_scale_one():
    """Hand-derived: the zigzag has slopes +-2, so at scale 1 the forward
    upper condition only survives where the window sees no rising slope."""
    zz = PwlFunction.zigzag()
    assert n_set_exact(zz, 1, "plus_upper") == IntervalSet.points([F(1, 2)])
    assert n_set_exact(zz, 1, "plus_lower") == IntervalSet.from_pairs([(0, F(3, 8))])
    assert n_set_exact(zz, 1, "minus_lower") == IntervalSet.points([F(1, 2)])
    assert n_set_exact(zz, 1, "minus_upper") == IntervalSet.from_pairs([(F(5, 8), 1)])
    full = n_set_exact(zz, 1, "full")
    assert full == IntervalSet.from_pairs(
        [(0, F(3, 8)), (F(1, 2), F(1, 2)), (F(5, 8), 1)]
    )


def test_zigzag_fills_domain_at_scale_two():
    zz = PwlFunction.zigzag()
    assert n_set_exact(zz, 2, "plus_upper") == IntervalSet.from_pairs([(0, F(3, 4))])
    assert n_set_exact(zz, 2, "full") == FULL


def test_n_set_exact_rejects_fractional_scale():
    with pytest.raises(ValueError):
        n_set_exact(PwlFunction.zero(), F(3, 2))


# -- exact N-sets: structural properties ------------------------------------


@given(st.integers(0, 10 ** 6), st.sampled_from(BASIC_VARIANTS))
@settings(max_examples=25, deadline=None)
def test_symmetry_reductions(seed, variant):
    """Each variant is the forward-upper set of a transformed function."""
    f = random_function(seed=seed, depth=4)
    a = 1 + seed % 3
    s = n_set_exact(f, a, variant)
    if variant == "plus_upper":
        other = s
    elif variant == "plus_lower":
        other = n_set_exact(f.negate(), a, "plus_upper")
    elif variant == "minus_lower":
        other = n_set_exact(f.reflect(), a, "plus_upper").reflect()
    else:
        other = n_set_exact(f.reflect().negate(), a, "plus_upper").reflect()
    assert s == other


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_scale_monotonicity(seed):
    f = random_function(seed=seed, depth=5)
    for variant in BASIC_VARIANTS + ("full",):
        prev = None
        for a in (1, 2, 3):
            cur = n_set_exact(f, a, variant)
            if prev is not None:
                assert is_subset(prev, cur)
            prev = cur


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_boundary_points_satisfy_the_inequality(seed):
    """Closedness: endpoints of every component are themselves members."""
    f = random_function(seed=seed, depth=5)
    a = 1 + seed % 3
    for variant in BASIC_VARIANTS:
        s = n_set_exact(f, a, variant)
        for lo, hi in s.intervals:
            for e in {lo, hi}:
                d = point_defect_exact(f, a, variant, e)
                assert d is not None and d <= 0


def test_composite_variants_are_unions():
    f = random_function(seed=99, depth=5)
    pu, pl = n_set_exact(f, 2, "plus_upper"), n_set_exact(f, 2, "plus_lower")
    mu_, ml = n_set_exact(f, 2, "minus_upper"), n_set_exact(f, 2, "minus_lower")
    assert n_set_exact(f, 2, "hat") == pu.union(ml)
    assert n_set_exact(f, 2, "check") == pl.union(mu_)
    assert n_set_exact(f, 2, "full") == pu.union(pl).union(mu_).union(ml)


def test_n_full_truncated_is_union_over_scales():
    f = random_function(seed=123, depth=5)
    u = n_full_truncated(f, [1, 2, 3])
    brute = EMPTY
    for a in (1, 2, 3):
        brute = brute.union(n_set_exact(f, a, "full"))
    assert u == brute


@given(st.integers(0, 10 ** 6), st.integers(1, 2))
@settings(max_examples=10, deadline=None)
def test_exact_agrees_with_grid_brute_force(seed, a):
    """Small-battery version of the main oracle comparison."""
    f = random_function(seed=seed, depth=5)
    s = n_set_exact(f, a, "full")
    pts = grid_n_set_full(f, a, step=1e-4)
    assert hausdorff_set_vs_points(s, pts) <= 2e-4


@given(st.integers(0, 10 ** 6), st.sampled_from(BASIC_VARIANTS))
@settings(max_examples=15, deadline=None)
def test_membership_matches_point_defect_sign(seed, variant):
    f = random_function(seed=seed, depth=4)
    a = 1 + seed % 3
    s = n_set_exact(f, a, variant)
    rng = np.random.default_rng(seed)
    for x in rng.uniform(0, 1, 25):
        xf = F(x).limit_denominator(2 ** 30)
        d = point_defect_exact(f, a, variant, xf)
        if d is None:
            assert not s.contains_point(xf)
        else:
            assert s.contains_point(xf) == (d <= 0)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=10, deadline=None)
def test_point_defect_float_parity(seed):
    f = random_function(seed=seed, depth=4)
    a = 1 + seed % 2
    rng = np.random.default_rng(seed + 1)
    xs = rng.uniform(0, 1, 40)
    for variant in BASIC_VARIANTS + ("full",):
        vec = point_defects_float(f, float(a), variant, xs)
        for x, dv in zip(xs, vec):
            ds = point_defect_float(f, float(a), variant, float(x))
            if np.isinf(ds) or np.isinf(dv):
                assert np.isinf(ds) and np.isinf(dv)
            else:
                assert dv == pytest.approx(ds, abs=1e-9)
            de = point_defect_exact(f, a, variant, F(x).limit_denominator(2 ** 40))
            if de is None:
                assert np.isinf(ds)
            else:
                assert ds == pytest.approx(float(de), abs=1e-9)


# -- certified C1 enclosures ------------------------------------------------


def test_enclosure_exact_for_pwl_integer_scale():
    f = random_function(seed=5, depth=4)
    enc = n_set_enclosure(f, 2, "full")
    assert enc.inner == enc.outer == n_set_exact(f, 2, "full")
    assert enc.undecided_length == 0


def test_enclosure_pwl_fractional_scale_small_slope_shortcut():
    z = PwlFunction.zero()
    enc = n_set_enclosure(z, F(43, 25), "plus_upper")
    assert enc.stats.get("shortcut")
    lo, hi = pow2_bounds(F(43, 25))
    assert enc.inner == IntervalSet.from_pairs([(0, 1 - hi)])
    assert enc.outer == IntervalSet.from_pairs([(0, 1 - lo)])


def test_enclosure_pwl_fractional_scale_steep_raises():
    steep = PwlFunction.from_pairs([(0, 0), (F(1, 2), 10), (1, 0)])
    with pytest.raises(ValueError):
        n_set_enclosure(steep, F(43, 25), "plus_upper")


def test_enclosure_c1_derivative_shortcut():
    f = random_c1_function(seed=2, cells=4, amplitude=0.1, slope_scale=0.5)
    a = F(int(np.ceil(f.deriv_sup_norm())) + 1)
    for variant in BASIC_VARIANTS:
        enc = n_set_enclosure(f, a, variant)
        assert enc.stats.get("shortcut")
        assert enc.inner == enc.outer


def test_enclosure_underflow_guard():
    f = C1Function.linear(6000.0)
    with pytest.raises(ValueError):
        n_set_enclosure(f, 5000, "plus_upper")


@given(st.integers(0, 10 ** 6))
@settings(max_examples=8, deadline=None)
def test_enclosure_soundness_against_defect_sampling(seed):
    """inner <= true set <= outer: certified-in points have nonpositive
    defect, points outside outer have positive defect."""
    f = random_c1_function(seed=seed, cells=4, amplitude=0.4, slope_scale=3.0)
    a = 2
    enc = n_set_enclosure(f, a, "plus_upper", tol=1e-4)
    assert is_subset(enc.inner, enc.outer)
    xs = np.linspace(0.0, 1.0 - 2.0 ** -a, 400)
    defects = point_defects_float(f, a, "plus_upper", xs)
    for x, d in zip(xs, defects):
        xf = F(float(x)).limit_denominator(2 ** 40)
        if enc.inner.contains_point(xf) and enc.inner.distance_to_point(xf) == 0:
            assert d <= 1e-7
        if not enc.outer.contains_point(xf) and enc.outer.distance_to_point(xf) > F(1, 10 ** 6):
            assert d > -1e-7


def test_enclosure_union_and_reflect():
    a = NSetEnclosure.exact(IntervalSet.from_pairs([(0, F(1, 4))]))
    b = NSetEnclosure.exact(IntervalSet.from_pairs([(F(1, 2), F(3, 4))]))
    u = a.union(b)
    assert u.inner == IntervalSet.from_pairs([(0, F(1, 4)), (F(1, 2), F(3, 4))])
    r = u.reflect()
    assert r.inner == IntervalSet.from_pairs([(F(1, 4), F(1, 2)), (F(3, 4), 1)])


def test_enclosure_rejects_bad_inputs():
    with pytest.raises(ValueError):
        n_set_enclosure(C1Function.zero(), 1, "sideways")
    with pytest.raises(ValueError):
        n_set_enclosure(C1Function.zero(), 1, "full", tol=0.0)
    with pytest.raises(TypeError):
        n_set_enclosure(lambda x: x, 1, "full")


# -- single-function scale comparisons --------------------------------------


def test_interior_inclusion_gentle_function():
    f = random_c1_function(seed=4, cells=4, amplitude=0.2, slope_scale=0.6)
    assert interior_inclusion_holds(f, 2, 3, tol=1e-4)


def test_c1_single_delta_positive_and_sound():
    f = random_c1_function(seed=8, cells=4, amplitude=0.2, slope_scale=0.6)
    d = c1_single_delta(f, 2, 3, tol=1e-4)
    assert d is not None and d > 0
    # perturbing below delta keeps the scale-2 set inside the scale-3 set
    g = f.add(C1Function.linear(0.0, float(d) * 0.5))
    enc_g = n_set_enclosure(g, 3, "full", tol=1e-4)
    enc_f = n_set_enclosure(f, 2, "full", tol=1e-4)
    assert is_subset(enc_f.outer, enc_g.inner)


def test_c1_continuity_delta_monotone_scales():
    f = random_c1_function(seed=15, cells=3, amplitude=0.2, slope_scale=0.5)
    d23 = c1_continuity_delta(f, 2, 3, tol=1e-4)
    assert d23 is None or d23 > 0
