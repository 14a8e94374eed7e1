"""Index combinatorics: the A-set identities, shift and permutation claims,
scale ladders, and the S/Y covering conditions on set sequences."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotpoints.indexcomb import (
    CombScenario,
    DeltaSeq,
    IndexSeq,
    ScaleLadder,
    SeqOfSets,
    apply_finite_permutation,
    check_perm_A,
    check_S_k,
    check_Y_k,
    index_set_A,
    random_finite_permutation,
    random_index_seq,
    shift_seq,
    verify_K_n_trick,
)
from knotpoints.intervalsets import EMPTY, FULL, IntervalSet, ball
from knotpoints.nsets import n_set_exact
from knotpoints.realfn import PwlFunction

F = Fraction

seeds = st.integers(0, 10 ** 6)


def seq(seed, length=11):
    return random_index_seq(seed, length)


# -- index sequences --------------------------------------------------------


def test_index_seq_growth_enforced():
    IndexSeq((1, 2, 4, 7))  # minimal growth n_{j+1} = n_j + j
    with pytest.raises(ValueError):
        IndexSeq((1, 2, 3))  # 3 < 2 + 2
    with pytest.raises(ValueError):
        IndexSeq((0, 1))
    with pytest.raises(ValueError):
        IndexSeq(())


def test_index_seq_accessors():
    n = IndexSeq((2, 3, 5, 9))
    assert n.n(1) == 2 and n.n(4) == 9
    with pytest.raises(ValueError):
        n.n(5)
    assert shift_seq(n, 2).prefix == (5, 9)
    assert n.shift(0).prefix == n.prefix
    with pytest.raises(ValueError):
        shift_seq(n, 4)
    with pytest.raises(ValueError):
        shift_seq(n, -1)


@given(seeds)
def test_random_index_seq_valid_and_deterministic(seed):
    a = random_index_seq(seed, 8)
    b = random_index_seq(seed, 8)
    assert a == b
    for j, (x, y) in enumerate(zip(a.prefix, a.prefix[1:]), start=1):
        assert y >= x + j


def test_index_set_A_needs_long_enough_prefix():
    n = IndexSeq((1, 2, 4))
    assert index_set_A(1, 1, n) == frozenset({1})
    with pytest.raises(ValueError):
        index_set_A(1, 5, n)
    with pytest.raises(ValueError):
        index_set_A(0, 1, n)
    with pytest.raises(ValueError):
        index_set_A(3, 2, n)


def test_index_set_A_explicit_example():
    n = IndexSeq((2, 4, 7))
    # A_2^3 = [n_2] u {n_2+1} = [4] u {5}
    assert index_set_A(2, 3, n) == frozenset({1, 2, 3, 4, 5})
    # A_1^3 = [n_1]
    assert index_set_A(1, 3, n) == frozenset({1, 2})
    # A_3^3 = [n_3]
    assert index_set_A(3, 3, n) == frozenset(range(1, 8))


# -- the four basic structural claims ---------------------------------------


@given(seeds)
@settings(max_examples=40)
def test_basic_claim_one_chains(seed):
    """[n_j] = A_j^j, growing in m; A_1^m through A_m^m grows to [n_m];
    every A_j^m sits between [n_j] and [n_m]."""
    n = seq(seed)
    for m in range(1, 9):
        chain = [index_set_A(j, m, n) for j in range(1, m + 1)]
        assert chain[-1] == frozenset(range(1, n.n(m) + 1))
        for a, b in zip(chain, chain[1:]):
            assert a <= b
    for j in range(1, 9):
        assert index_set_A(j, j, n) == frozenset(range(1, n.n(j) + 1))
        prev = index_set_A(j, j, n)
        for m in range(j + 1, 9):
            cur = index_set_A(j, m, n)
            assert prev <= cur
            assert frozenset(range(1, n.n(j) + 1)) <= cur <= frozenset(range(1, n.n(m) + 1))
            prev = cur


@given(seeds, st.integers(0, 3))
@settings(max_examples=40)
def test_basic_claim_two_shift_inclusion(seed, k):
    """A_j^{m+1} of the k-shift is inside A_j^m of the (k+1)-shift."""
    n = seq(seed)
    nk = shift_seq(n, k) if k else n
    nk1 = shift_seq(n, k + 1)
    for m in range(1, 8):
        for j in range(1, m + 1):
            if max(j, m) > len(nk) or max(j, m - 1) > len(nk1):
                continue
            assert index_set_A(j, m + 1, nk) <= index_set_A(j, m, nk1)


@given(seeds, st.integers(0, 3))
@settings(max_examples=30)
def test_basic_claim_three_shift_equivalence(seed, k):
    """Checking the S-condition at shift k equals checking at shift 0 on the
    pre-shifted sequence: same verdict, same witnesses, same margins."""
    n = seq(seed)
    rng = random.Random(seed)
    K = random_interval_seq(rng, n.n(11) + 8)
    delta = DeltaSeq.geometric(F(1, 4), F(1, 2), 8)
    lhs = check_S_k(K, n, delta, k, 8)
    rhs = check_S_k(K, shift_seq(n, k) if k else n, delta, 0, 8)
    assert lhs.ok == rhs.ok
    assert lhs.failures == rhs.failures
    assert lhs.margins == rhs.margins


@given(seeds)
@settings(max_examples=30)
def test_basic_claim_four_shift_monotone(seed):
    """S at shift k implies S at shift k+1.  Non-vacuous on the clustered
    corpus (all sets within half the last radius of each other)."""
    n = seq(seed)
    rng = random.Random(seed + 1)
    delta = DeltaSeq.geometric(F(1, 4), F(1, 2), 8)
    spread = delta.d(8) / 2
    base = F(rng.randint(10, 50), 100)
    K = SeqOfSets(
        tuple(
            IntervalSet.from_pairs(
                [(base, base + F(rng.randint(0, int(spread * 400)), 400))]
            )
            for _ in range(n.n(11) + 8)
        )
    )
    verdicts = [check_S_k(K, n, delta, k, 8).ok for k in range(4)]
    assert verdicts[0]
    for a, b in zip(verdicts, verdicts[1:]):
        assert (not a) or b


@given(seeds, st.integers(0, 2))
@settings(max_examples=40)
def test_new_block_identity(seed, k):
    """The fresh indices added at depth m+1 are the same whether seen as a
    difference of consecutive A-sets of the k-shift or of the (k+1)-shift."""
    n = seq(seed)
    nk = shift_seq(n, k) if k else n
    nk1 = shift_seq(n, k + 1)
    for m in range(3, 8):
        for j in range(2, m):
            if max(j, m) > len(nk) or max(j, m - 1) > len(nk1):
                continue
            lhs = index_set_A(j, m, nk1) - index_set_A(j, m - 1, nk1)
            rhs = index_set_A(j, m + 1, nk) - index_set_A(j, m, nk)
            block = frozenset(range(nk1.n(m - 1) + 1, nk1.n(m - 1) + j))
            assert lhs == rhs == block


# -- delta sequences and set sequences --------------------------------------


def test_delta_seq_validation():
    DeltaSeq((F(1, 2), F(1, 4)))
    with pytest.raises(ValueError):
        DeltaSeq((F(1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        DeltaSeq((F(1, 2), F(3, 4)))
    with pytest.raises(ValueError):
        DeltaSeq((F(3, 2),))


def test_delta_seq_geometric():
    d = DeltaSeq.geometric(F(1, 4), F(1, 2), 3)
    assert d.prefix == (F(1, 4), F(1, 8), F(1, 16))
    assert d.d(2) == F(1, 8)
    with pytest.raises(ValueError):
        d.d(4)


def test_seq_of_sets():
    K = SeqOfSets((FULL, EMPTY, IntervalSet.from_pairs([(0, F(1, 2))])))
    assert K.K(1) == FULL
    assert K.union_over([2, 3]) == IntervalSet.from_pairs([(0, F(1, 2))])
    assert len(K) == 3
    with pytest.raises(ValueError):
        K.K(4)
    assert SeqOfSets.from_json_list(K.to_json_list()) == K


# -- scale ladders ----------------------------------------------------------


LADDER_B = (5, 6, 7, 8, 9, 10, 11, 12)


def test_ladder_chains_validate_both_kinds():
    ScaleLadder.default(LADDER_B).validate_chains(8)
    ScaleLadder.geometric(LADDER_B).validate_chains(8)


def test_ladder_validation_errors():
    with pytest.raises(ValueError):
        ScaleLadder.default((3,))  # b_1 must exceed 3
    with pytest.raises(ValueError):
        ScaleLadder.default((5, 5))
    with pytest.raises(ValueError):
        ScaleLadder((F(5),), kind="cubic")


def test_ladder_base_scales():
    lad = ScaleLadder.default(LADDER_B)
    assert lad.a(3) == 3
    assert lad.b(2) == 6
    with pytest.raises(ValueError):
        lad.b(9)


@pytest.mark.parametrize("lad", [ScaleLadder.default(LADDER_B), ScaleLadder.geometric(LADDER_B)])
def test_ladder_welds_exact(lad):
    for j in range(1, 5):
        for m in range(j, 6):
            assert lad.a_refined(j, m, 4) == lad.a_refined(j, m + 1, 1)
            assert lad.b_refined(j, m, 3) == lad.b_refined(j, m + 1, 1)


def test_ladder_refined_ordering():
    lad = ScaleLadder.geometric(LADDER_B)
    for j in (1, 2, 3):
        assert lad.a(j) < lad.a_refined(j, j + 2, 4) < lad.a_refined(j, j, 1) < lad.a(j) + 1
        assert lad.b(j) - 1 < lad.b_refined(j, j, 1) < lad.b_refined(j, j + 2, 3) < lad.b(j)
        assert lad.a_refined(j, j, 1) < j + 1 < lad.b_refined(j, j, 1)


def test_ladder_refined_rejects_bad_indices():
    lad = ScaleLadder.default(LADDER_B)
    with pytest.raises(ValueError):
        lad.a_refined(2, 1, 1)
    with pytest.raises(ValueError):
        lad.a_refined(1, 1, 5)
    with pytest.raises(ValueError):
        lad.b_refined(1, 1, 4)


# -- covering conditions ----------------------------------------------------


def random_interval_seq(rng: random.Random, length: int) -> SeqOfSets:
    out = []
    for _ in range(length):
        lo = F(rng.randint(0, 90), 100)
        hi = lo + F(rng.randint(1, 10), 100)
        out.append(IntervalSet.from_pairs([(lo, min(hi, F(1)))]))
    return SeqOfSets(tuple(out))


def test_check_s_reports_witnesses():
    n = IndexSeq((1, 2, 4, 7))
    delta = DeltaSeq.geometric(F(1, 100), F(1, 2), 4)
    far = [IntervalSet.from_pairs([(0, F(1, 100))])] * 4
    # index 5 enters A_2^4 - A_2^3 = {n_3+1} and sits far from the early sets
    far += [IntervalSet.from_pairs([(F(9, 10), 1)])] * 4
    res = check_S_k(SeqOfSets(tuple(far)), n, delta, 0, 4)
    assert not res.ok
    assert ("s", 2, 4) in res.failures
    assert res.margins[("s", 2, 4)] <= 0


def test_check_s_rejects_bad_args():
    n = IndexSeq((1, 2, 4))
    delta = DeltaSeq.geometric(F(1, 4), F(1, 2), 3)
    K = SeqOfSets((FULL,) * 6)
    with pytest.raises(ValueError):
        check_S_k(K, n, delta, -1, 3)
    with pytest.raises(ValueError):
        check_S_k(K, n, delta, 0, 0)


def zigzag_scenario():
    """K_n = exact exception set at scale matching the base ladder wherever
    the index is some n_j, the coarsest set elsewhere: makes the lower family
    exact at distance zero, and scale monotonicity does the rest."""
    zz = PwlFunction.zigzag()
    n = IndexSeq((2, 4, 7, 11, 16))
    lad = ScaleLadder.default((4, 5, 6))
    target = {n.n(j): j for j in (1, 2, 3)}
    sets = []
    for idx in range(1, n.n(4) + 1):
        j = target.get(idx, 1)
        sets.append(n_set_exact(zz, int(lad.a(j)), "full"))
    K = SeqOfSets(tuple(sets))
    delta = DeltaSeq.geometric(F(1, 4), F(1, 2), 5)
    return K, zz, n, delta, lad


def test_check_y_holds_on_exact_construction():
    K, zz, n, delta, lad = zigzag_scenario()
    res0 = check_Y_k(K, zz, n, delta, lad, 0, 3)
    assert res0.ok, (res0.failures, res0.undecided)
    res1 = check_Y_k(K, zz, n, delta, lad, 1, 3)
    assert res1.ok, (res1.failures, res1.undecided)


def test_check_y_detects_a_broken_set():
    K, zz, n, delta, lad = zigzag_scenario()
    sets = list(K.prefix)
    for idx in range(n.n(1)):  # every candidate for j=1 is now useless
        sets[idx] = IntervalSet.points([F(99, 100)])
    res = check_Y_k(SeqOfSets(tuple(sets)), zz, n, delta, lad, 0, 3)
    assert not res.ok
    assert any(fam == "lower" for fam, _, _ in res.failures)


def test_verify_K_n_trick_on_exact_construction():
    K, zz, n, delta, lad = zigzag_scenario()
    assert verify_K_n_trick(K, n, delta, 0, 1, 3)
    assert verify_K_n_trick(K, n, delta, 1, 2, 3)


def test_verify_K_n_trick_needs_valid_s():
    n = IndexSeq((1, 2, 4, 7))
    delta = DeltaSeq.geometric(F(1, 100), F(1, 2), 4)
    far = [IntervalSet.from_pairs([(0, F(1, 100))])] * 4
    far += [IntervalSet.from_pairs([(F(9, 10), 1)])] * 4
    with pytest.raises(ValueError):
        verify_K_n_trick(SeqOfSets(tuple(far)), n, delta, 0, 2, 4)
    with pytest.raises(ValueError):
        verify_K_n_trick(SeqOfSets(tuple(far)), n, delta, 0, 0, 4)


# -- finite permutations ----------------------------------------------------


def test_apply_finite_permutation():
    K = SeqOfSets(
        (
            IntervalSet.from_pairs([(0, F(1, 4))]),
            IntervalSet.from_pairs([(F(1, 4), F(1, 2))]),
            IntervalSet.from_pairs([(F(1, 2), F(3, 4))]),
        )
    )
    out = apply_finite_permutation(K, (2, 1))
    assert out.K(1) == K.K(2)
    assert out.K(2) == K.K(1)
    assert out.K(3) == K.K(3)
    with pytest.raises(ValueError):
        apply_finite_permutation(K, (2, 2))
    with pytest.raises(ValueError):
        apply_finite_permutation(K, (2, 1, 4, 3))


@given(seeds, st.integers(1, 3))
@settings(max_examples=50)
def test_perm_claims_hold_for_admissible_sigma(seed, k):
    n = seq(seed)
    sigma = random_finite_permutation(seed + 1, n.n(k))
    res = check_perm_A(n, sigma, k, 8)
    assert res.ok, res.failures


def test_perm_rejects_sigma_moving_high_indices():
    n = IndexSeq((2, 3, 5))
    # swaps 4 and 5, both above n_1 = 2
    with pytest.raises(ValueError):
        check_perm_A(n, (1, 2, 3, 5, 4), 1)
    with pytest.raises(ValueError):
        check_perm_A(n, (2, 1), 0)


# -- scenario files ---------------------------------------------------------


def test_comb_scenario_round_trip():
    rng = random.Random(7)
    sc = CombScenario(
        K=random_interval_seq(rng, 9),
        n=IndexSeq((2, 3, 5, 8)),
        delta=DeltaSeq.geometric(F(1, 4), F(1, 2), 4),
        k=1,
        m_max=4,
    )
    assert CombScenario.loads(sc.dumps()) == sc
