"""Finite combinatorics of index sequences and set-sequence inclusions.

The objects here are finite prefixes of three sequence spaces: index
sequences n_1 < n_2 < ... with n_{j+1} >= n_j + j, strictly decreasing
delta sequences in (0,1), and sequences of compact subsets of [0,1].  From an
index sequence we build the finite index sets

    A_j^m(n) = [n_j]  union  {n_i+1, ..., n_i+j-1} for i = j..m-1,

whose telescoping structure drives two families of covering conditions:
the S-condition relates consecutive difference blocks of a set sequence to
slightly earlier sets, and the Y-condition ties the sequence to the exception
sets of a function at a scale ladder.  All checks run on explicit prefixes
with a caller-supplied depth and report the exact (j,m) witnesses on failure.

Scales are exact rationals throughout; set inclusions use the exact interval
arithmetic from `intervalsets` (open balls checked with strict margin).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .intervalsets import (
    EMPTY,
    FULL,
    IntervalSet,
    Rat,
    as_fraction,
    ball,
    subset_within,
)
from .nsets import n_set_enclosure, n_set_exact
from .realfn import C1Function, PwlFunction

__all__ = [
    "IndexSeq",
    "DeltaSeq",
    "SeqOfSets",
    "ScaleLadder",
    "CombCheck",
    "CombScenario",
    "index_set_A",
    "shift_seq",
    "check_S_k",
    "check_Y_k",
    "verify_K_n_trick",
    "apply_finite_permutation",
    "check_perm_A",
    "random_index_seq",
    "random_finite_permutation",
]


@dataclass(frozen=True)
class IndexSeq:
    """Finite prefix of an index sequence with superlinear growth
    n_{j+1} >= n_j + j."""

    prefix: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))
        if not self.prefix:
            raise ValueError("IndexSeq prefix must be nonempty")
        if self.prefix[0] < 1:
            raise ValueError("indices must be positive")
        for j, (x, y) in enumerate(zip(self.prefix, self.prefix[1:]), start=1):
            if y < x + j:
                raise ValueError(f"growth violated at position {j}: {y} < {x}+{j}")

    def __len__(self) -> int:
        return len(self.prefix)

    def n(self, j: int) -> int:
        """1-based entry n_j."""
        if not 1 <= j <= len(self.prefix):
            raise ValueError(f"n_{j} not available in prefix of length {len(self.prefix)}")
        return self.prefix[j - 1]

    def shift(self, k: int) -> "IndexSeq":
        return shift_seq(self, k)


def shift_seq(n: IndexSeq, k: int) -> IndexSeq:
    """Drop the first k entries: the shifted sequence n^k with n^k_j = n_{j+k}."""
    if k < 0:
        raise ValueError("shift must be nonnegative")
    if k >= len(n):
        raise ValueError(f"cannot shift a prefix of length {len(n)} by {k}")
    return IndexSeq(n.prefix[k:])


def index_set_A(j: int, m: int, n: IndexSeq) -> frozenset[int]:
    """The finite index set A_j^m(n); needs the prefix up to max(j, m-1)."""
    if j < 1 or m < j:
        raise ValueError("need 1 <= j <= m")
    need = max(j, m - 1)
    if need > len(n):
        raise ValueError(f"A_{j}^{m} needs a prefix of length {need}, got {len(n)}")
    out = set(range(1, n.n(j) + 1))
    for i in range(j, m):
        out.update(range(n.n(i) + 1, n.n(i) + j))
    return frozenset(out)


@dataclass(frozen=True)
class DeltaSeq:
    """Finite prefix of a strictly decreasing sequence in (0,1), exact."""

    prefix: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(as_fraction(x) for x in self.prefix))
        for x in self.prefix:
            if not 0 < x < 1:
                raise ValueError("delta entries must lie in (0,1)")
        for x, y in zip(self.prefix, self.prefix[1:]):
            if not y < x:
                raise ValueError("delta entries must strictly decrease")

    @staticmethod
    def geometric(first: Rat, ratio: Rat, length: int) -> "DeltaSeq":
        f, r = as_fraction(first), as_fraction(ratio)
        return DeltaSeq(tuple(f * r**i for i in range(length)))

    def __len__(self) -> int:
        return len(self.prefix)

    def d(self, m: int) -> Fraction:
        if not 1 <= m <= len(self.prefix):
            raise ValueError(f"delta_{m} not available in prefix of length {len(self.prefix)}")
        return self.prefix[m - 1]


@dataclass(frozen=True)
class SeqOfSets:
    """Finite prefix of a sequence of compact subsets of [0,1]."""

    prefix: tuple[IntervalSet, ...]

    def __post_init__(self) -> None:
        for s in self.prefix:
            if not isinstance(s, IntervalSet):
                raise TypeError("SeqOfSets entries must be IntervalSet")

    def __len__(self) -> int:
        return len(self.prefix)

    def K(self, n: int) -> IntervalSet:
        if not 1 <= n <= len(self.prefix):
            raise ValueError(f"K_{n} not available in prefix of length {len(self.prefix)}")
        return self.prefix[n - 1]

    def union_over(self, indices: Iterable[int]) -> IntervalSet:
        out = EMPTY
        for i in sorted(indices):
            out = out.union(self.K(i))
        return out

    def to_json_list(self) -> list[dict]:
        return [s.to_json_dict() for s in self.prefix]

    @staticmethod
    def from_json_list(items: Sequence[dict]) -> "SeqOfSets":
        return SeqOfSets(tuple(IntervalSet.from_json_dict(d) for d in items))


# ---------------------------------------------------------------------------
# scale ladders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleLadder:
    """Base scales a_j = j and b_j (given, with b_j > j+2) together with the
    four refined a-scales and three refined b-scales per (j,m).

    The refined scales interpolate strictly: for each j, walking (m,k) in
    lexicographic order descends from just below a_{j}+1 toward a_j on the
    a-side and ascends from just above b_j-1 toward b_j on the b-side, with
    the chain welds a_j^{m,4} = a_j^{m+1,1} and b_j^{m,3} = b_j^{m+1,1}.

    Two refinement shapes: "dyadic" uses the offsets 2^-(3m+k) and 2^-(2m+k);
    "geometric" uses scale*ratio^(3(m-j)+k-1) and scale*ratio^(2(m-j)+k-1),
    which approach the base scales much more slowly and so leave far wider
    gaps between neighbors (the certified numerics need those gaps at desk
    scale).  Everything is exact rational arithmetic.
    """

    b_values: tuple[Fraction, ...]
    kind: str = "dyadic"
    ratio: Fraction = Fraction(4, 5)
    scale: Fraction = Fraction(9, 10)

    def __post_init__(self) -> None:
        object.__setattr__(self, "b_values", tuple(as_fraction(x) for x in self.b_values))
        object.__setattr__(self, "ratio", as_fraction(self.ratio))
        object.__setattr__(self, "scale", as_fraction(self.scale))
        if self.kind not in ("dyadic", "geometric"):
            raise ValueError("kind must be 'dyadic' or 'geometric'")
        if not 0 < self.ratio < 1 or not 0 < self.scale < 1:
            raise ValueError("need 0 < ratio < 1 and 0 < scale < 1")
        for j, b in enumerate(self.b_values, start=1):
            if not b > j + 2:
                raise ValueError(f"b_{j} = {b} must exceed {j}+2")
        for x, y in zip(self.b_values, self.b_values[1:]):
            if not x < y:
                raise ValueError("b values must strictly increase")

    @staticmethod
    def default(b_values: Sequence[Rat]) -> "ScaleLadder":
        return ScaleLadder(tuple(as_fraction(b) for b in b_values))

    @staticmethod
    def geometric(b_values: Sequence[Rat], ratio: Rat = Fraction(4, 5), scale: Rat = Fraction(9, 10)) -> "ScaleLadder":
        return ScaleLadder(tuple(as_fraction(b) for b in b_values), "geometric", as_fraction(ratio), as_fraction(scale))

    def a(self, j: int) -> Fraction:
        if j < 1:
            raise ValueError("j must be positive")
        return Fraction(j)

    def b(self, j: int) -> Fraction:
        if not 1 <= j <= len(self.b_values):
            raise ValueError(f"b_{j} not available ({len(self.b_values)} values)")
        return self.b_values[j - 1]

    def a_refined(self, j: int, m: int, k: int) -> Fraction:
        if not (1 <= j <= m and 1 <= k <= 4):
            raise ValueError("need 1 <= j <= m and k in [4]")
        if self.kind == "dyadic":
            return j + Fraction(1, 2 ** (3 * m + k))
        return j + self.scale * self.ratio ** (3 * (m - j) + k - 1)

    def b_refined(self, j: int, m: int, k: int) -> Fraction:
        if not (1 <= j <= m and 1 <= k <= 3):
            raise ValueError("need 1 <= j <= m and k in [3]")
        base = self.b(j)
        if self.kind == "dyadic":
            return base - Fraction(1, 2 ** (2 * m + k))
        return base - self.scale * self.ratio ** (2 * (m - j) + k - 1)

    def validate_chains(self, m_max: int) -> None:
        """Exact verification of the interleaving invariants up to depth
        m_max for every j with a b-value: strict monotone walks with exact
        equality at the (m,last) = (m+1,1) welds."""
        for j in range(1, len(self.b_values) + 1):
            if j > m_max:
                continue
            a_walk = [
                ((m, k), self.a_refined(j, m, k))
                for m in range(max(j, 1), m_max + 1)
                for k in (1, 2, 3, 4)
            ]
            if not self.a(j + 1) > a_walk[0][1]:
                raise AssertionError(f"a chain top violated at j={j}")
            for ((_, k1), x), ((_, k2), y) in zip(a_walk, a_walk[1:]):
                if k1 == 4 and k2 == 1:
                    if x != y:
                        raise AssertionError(f"a chain weld broken at j={j}")
                elif not x > y:
                    raise AssertionError(f"a chain not strictly descending at j={j}")
            if not a_walk[-1][1] > self.a(j):
                raise AssertionError(f"a chain must stay above a_j at j={j}")
            b_walk = [
                ((m, k), self.b_refined(j, m, k))
                for m in range(max(j, 1), m_max + 1)
                for k in (1, 2, 3)
            ]
            if not self.b(j) - 1 < b_walk[0][1]:
                raise AssertionError(f"b chain bottom violated at j={j}")
            for ((_, k1), x), ((_, k2), y) in zip(b_walk, b_walk[1:]):
                if k1 == 3 and k2 == 1:
                    if x != y:
                        raise AssertionError(f"b chain weld broken at j={j}")
                elif not x < y:
                    raise AssertionError(f"b chain not strictly ascending at j={j}")
            if not b_walk[-1][1] < self.b(j):
                raise AssertionError(f"b chain must stay below b_j at j={j}")
            if not self.b(j) - 1 > j + 1:
                raise AssertionError(f"b_{j} - 1 must exceed {j}+1")
            # separation a_j^{m,k} < j+1 < b_j^{m',k'}
            if not a_walk[0][1] < j + 1 < b_walk[0][1]:
                raise AssertionError(f"separation around {j}+1 violated")


# ---------------------------------------------------------------------------
# covering checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CombCheck:
    """Outcome of a family of inclusion checks: ok means every required
    inclusion was certified; failures/undecided list the offending (family,
    j, m) triples; margins record the certified slack per checked triple."""

    ok: bool
    failures: tuple = ()
    undecided: tuple = ()
    margins: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.ok


def check_S_k(K: SeqOfSets, n: IndexSeq, delta: DeltaSeq, k: int, m_max: int) -> CombCheck:
    """The S-condition at shift k, truncated at depth m_max: for every
    2 <= j <= m-1 <= m_max-1, the sets indexed by the new block
    A_j^m(n^k) minus A_j^{m-1}(n^k) lie in the open delta_m-neighborhood of
    the sets indexed by A_{j-1}^{m-1}(n^k).  Failures are keyed ("s", j, m);
    too-short prefixes surface as argument errors from the accessors."""
    if k < 0 or m_max < 1:
        raise ValueError("need k >= 0 and m_max >= 1")
    nk = shift_seq(n, k) if k else n
    failures = []
    margins = {}
    for m in range(3, m_max + 1):
        for j in range(2, m):
            block = index_set_A(j, m, nk) - index_set_A(j, m - 1, nk)
            lhs = K.union_over(block)
            rhs = K.union_over(index_set_A(j - 1, m - 1, nk))
            ok, margin = subset_within(lhs, rhs, delta.d(m))
            margins[("s", j, m)] = margin
            if not ok:
                failures.append(("s", j, m))
    return CombCheck(not failures, tuple(failures), (), margins)


_ENGINE_SCALE_CAP = 17


def _n_full_bounds(f, a: Rat, tol: float) -> tuple[IntervalSet, IntervalSet, Rat]:
    """(inner, outer, scale used) bracket of the full exception set at scale
    a.  Piecewise-linear input is exact.  When a C1 scale is beyond the
    engine's certified range, the inner bound falls back to the largest
    feasible smaller scale (the sets grow with the scale, so it is still a
    subset) and the outer bound degrades to the trivial [0,1]."""
    if isinstance(f, PwlFunction):
        s = n_set_exact(f, a, "full")
        return s, s, as_fraction(a)
    af = as_fraction(a)
    try:
        enc = n_set_enclosure(f, af, "full", tol)
        return enc.inner, enc.outer, af
    except ValueError:
        c = Fraction(min(int(af), _ENGINE_SCALE_CAP))
        if c <= 0 or c >= af:
            raise
        enc = n_set_enclosure(f, c, "full", tol)
        return enc.inner, FULL, c


def check_Y_k(
    K: SeqOfSets,
    f,
    n: IndexSeq,
    delta: DeltaSeq,
    ladder: ScaleLadder,
    k: int,
    m_max: int,
    tol: float = 1e-4,
) -> CombCheck:
    """The Y-condition at shift k, truncated at depth m_max: the S-condition
    plus, for every j <= m <= m_max,

      (lower family) N(f, a_j) inside the union of open delta_m-balls around
      the sets indexed by A_j^m(n^k), and
      (upper family) the union of sets indexed by A_j^m(n) inside the open
      delta_m-ball around N(f, b_j).

    Exact for piecewise-linear f; for C1 f the sound enclosure side is used
    (outer on the left of the lower family, inner on the right of the upper).
    A failed sound check is re-tested on the anti-sound side: if that side
    passes, the triple is reported undecided rather than failed.
    """
    s = check_S_k(K, n, delta, k, m_max)
    failures = list(s.failures)
    undecided = []
    margins = dict(s.margins)
    nk = shift_seq(n, k) if k else n

    for j in range(1, m_max + 1):
        low_in, low_out, _ = _n_full_bounds(f, ladder.a(j), tol)
        up_in, up_out, _ = _n_full_bounds(f, ladder.b(j), tol)
        for m in range(j, m_max + 1):
            dm = delta.d(m)
            rhs = K.union_over(index_set_A(j, m, nk))
            ok, margin = subset_within(low_out, rhs, dm)
            margins[("lower", j, m)] = margin
            if not ok:
                refutable, _ = subset_within(low_in, rhs, dm)
                if not refutable:
                    failures.append(("lower", j, m))
                else:
                    undecided.append(("lower", j, m))
            lhs = K.union_over(index_set_A(j, m, n))
            ok, margin = subset_within(lhs, up_in, dm)
            margins[("upper", j, m)] = margin
            if not ok:
                survivable, _ = subset_within(lhs, up_out, dm)
                if not survivable:
                    failures.append(("upper", j, m))
                else:
                    undecided.append(("upper", j, m))
    return CombCheck(not failures, tuple(failures), tuple(undecided), margins)


def verify_K_n_trick(
    K: SeqOfSets, n: IndexSeq, delta: DeltaSeq, k: int, j: int, m_max: int
) -> bool:
    """Depth-truncated surrogate of the ball-intersection collapse: the
    intersection over m in [j, m_max] of the closed delta_m-dilations of the
    union over A_j^m(n^k) must lie in the open delta_{m_max}-neighborhood of
    the union of all sets in the prefix.  Failure refutes the mechanism at
    this depth; success is finite evidence only."""
    if j < 1 or m_max < j:
        raise ValueError("need 1 <= j <= m_max")
    s = check_S_k(K, n, delta, k, m_max)
    if not s.ok:
        raise ValueError(f"S-condition fails at {s.failures}; trick precondition unmet")
    nk = shift_seq(n, k) if k else n
    cap = FULL
    for m in range(j, m_max + 1):
        # interval data is closed, so this dilation is the closed ball,
        # a superset of the open one: conservative for the check below
        cap = cap.intersect(ball(K.union_over(index_set_A(j, m, nk)), delta.d(m)))
    everything = K.union_over(range(1, len(K) + 1))
    ok, _ = subset_within(cap, everything, delta.d(m_max))
    return ok


# ---------------------------------------------------------------------------
# finite permutations
# ---------------------------------------------------------------------------


def _validate_permutation(sigma: Sequence[int]) -> tuple[int, ...]:
    p = tuple(int(x) for x in sigma)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise ValueError("sigma must list the images of 1..p as a permutation")
    return p


def _sigma_apply(sigma: tuple[int, ...], i: int) -> int:
    return sigma[i - 1] if i <= len(sigma) else i


def apply_finite_permutation(K: SeqOfSets, sigma: Sequence[int]) -> SeqOfSets:
    """Relabel a set sequence along a finite permutation: entry n of the
    result is K_{sigma(n)}, with sigma the identity beyond its table."""
    s = _validate_permutation(sigma)
    if len(s) > len(K):
        raise ValueError("permutation table longer than the set prefix")
    return SeqOfSets(tuple(K.K(_sigma_apply(s, i)) for i in range(1, len(K) + 1)))


def check_perm_A(n: IndexSeq, sigma: Sequence[int], k: int, m_max: int | None = None) -> CombCheck:
    """Both invariance claims for a permutation fixing everything above n_k:
    (1) every A_j^m(n^k) is sigma-invariant; (2) sigma(A_j^m(n)) lies inside
    A_{max(j,k)}^{max(m,k)}(n); checked for all j <= m up to depth."""
    s = _validate_permutation(sigma)
    if not 1 <= k <= len(n):
        raise ValueError("need 1 <= k <= prefix length")
    bound = n.n(k)
    movers = [i for i in range(1, len(s) + 1) if _sigma_apply(s, i) != i and i > bound]
    if movers:
        raise ValueError(f"sigma moves indices above n_{k}={bound}: {movers}")
    if m_max is None:
        m_max = len(n)
    failures = []
    shifted = shift_seq(n, k) if k < len(n) else None
    for m in range(1, m_max + 1):
        for j in range(1, m + 1):
            if shifted is not None and max(j, m - 1) <= len(shifted):
                A = index_set_A(j, m, shifted)
                if frozenset(_sigma_apply(s, i) for i in A) != A:
                    failures.append(("invariant", j, m))
            if max(j, m - 1) <= len(n) and max(max(m, k) - 1, max(j, k)) <= len(n):
                img = frozenset(_sigma_apply(s, i) for i in index_set_A(j, m, n))
                target = index_set_A(max(j, k), max(m, k), n)
                if not img <= target:
                    failures.append(("image", j, m))
    return CombCheck(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# corpus helpers and scenario files
# ---------------------------------------------------------------------------


def random_index_seq(seed, length: int, slack: int = 3) -> IndexSeq:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    vals = [rng.randint(1, 1 + slack)]
    for j in range(1, length):
        vals.append(vals[-1] + j + rng.randint(0, slack))
    return IndexSeq(tuple(vals))


def random_finite_permutation(seed, p: int) -> tuple[int, ...]:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    table = list(range(1, p + 1))
    rng.shuffle(table)
    return tuple(table)


@dataclass(frozen=True)
class CombScenario:
    """Self-contained input for the covering checks, JSON round-trippable."""

    K: SeqOfSets
    n: IndexSeq
    delta: DeltaSeq
    k: int
    m_max: int

    def to_json_dict(self) -> dict:
        return {
            "n_prefix": list(self.n.prefix),
            "delta_prefix": [str(d) for d in self.delta.prefix],
            "k": self.k,
            "m_max": self.m_max,
            "sets": self.K.to_json_list(),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "CombScenario":
        return CombScenario(
            K=SeqOfSets.from_json_list(d["sets"]),
            n=IndexSeq(tuple(d["n_prefix"])),
            delta=DeltaSeq(tuple(Fraction(x) for x in d["delta_prefix"])),
            k=int(d["k"]),
            m_max=int(d["m_max"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @staticmethod
    def loads(text: str) -> "CombScenario":
        return CombScenario.from_json_dict(json.loads(text))
