"""Binary tests on set-valued measurements.

A test is a total decision rule on the output range, represented by the
region it maps to the null label p0.  The quantities of interest are its
correct set (outputs where the decision is guaranteed right no matter which
source value produced them), the log-size of that set as a performance
score, and the symmetric-difference bound that no test can beat.  Consistent
tests attain the bound; `brute_force_optimum` verifies that by exhaustive
enumeration on finite worlds.

Log conventions: natural log for measure-based (continuous) quantities,
base 2 for cardinality-based (discrete) ones.  An empty correct set scores
-inf rather than raising.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

from .nset import DiscreteSet, NSet
from .uvar import P0, P1, FiniteWorld, conditional_range, entropy_h0, entropy_H0, marginal_range

SetLike = Union[NSet, DiscreteSet]

AMBIGUOUS = "ambiguous"

_BOUND_SLACK = 1e-9


class RangeError(ValueError):
    """Invalid conditional output ranges."""


def _log_size(s: SetLike) -> float:
    """log measure (continuous, natural) or log cardinality (discrete, base 2)."""
    if isinstance(s, NSet):
        return entropy_h0(s)
    return math.log2(s.cardinality) if s.cardinality else -math.inf


@dataclass(frozen=True)
class ConditionalOutputRanges:
    """The two conditional output ranges of a measurement under each hypothesis."""

    r_p0: SetLike
    r_p1: SetLike

    def __post_init__(self):
        same_kind = (isinstance(self.r_p0, NSet) and isinstance(self.r_p1, NSet)) or (
            isinstance(self.r_p0, DiscreteSet) and isinstance(self.r_p1, DiscreteSet))
        if not same_kind:
            raise RangeError("conditional ranges must both be NSet or both DiscreteSet")
        if self.r_p0.is_empty or self.r_p1.is_empty:
            raise RangeError("conditional output ranges must be nonempty")

    @property
    def continuous(self) -> bool:
        return isinstance(self.r_p0, NSet)

    @property
    def r_y(self) -> SetLike:
        """Full output range, the union of the two conditional ranges."""
        return self.r_p0.union(self.r_p1)

    @property
    def overlap(self) -> SetLike:
        return self.r_p0.intersect(self.r_p1)

    @property
    def sym_difference(self) -> SetLike:
        return self.r_p0.symdiff(self.r_p1)

    def output_entropy(self) -> float:
        r = self.r_y
        return entropy_h0(r) if self.continuous else entropy_H0(r)


@dataclass(frozen=True)
class Test:
    """Total decision rule on the output range, stored as the p0 region."""

    domain: SetLike
    p0_region: SetLike
    tie_rule: str = P0

    def __post_init__(self):
        if self.tie_rule not in (P0, P1):
            raise ValueError(f"tie_rule must be 'p0' or 'p1', got {self.tie_rule!r}")
        if not self.p0_region.issubset(self.domain):
            raise ValueError("p0 region must lie inside the test domain")

    @property
    def p1_region(self) -> SetLike:
        return self.domain.difference(self.p0_region)

    def decide(self, y) -> str:
        if not self.domain.contains(y):
            raise ValueError(f"output {y!r} lies outside the test domain")
        return P0 if self.p0_region.contains(y) else P1


def verdict(r: ConditionalOutputRanges, y) -> str:
    """Three-valued diagnostic for an output: 'p0', 'p1', or 'ambiguous'.

    Outputs in the overlap of the conditional ranges carry no usable
    evidence either way; the binary decision there is the tie rule's.
    """
    in0 = r.r_p0.contains(y)
    in1 = r.r_p1.contains(y)
    if in0 and in1:
        return AMBIGUOUS
    if in0:
        return P0
    if in1:
        return P1
    raise ValueError(f"output {y!r} lies outside the output range")


def consistent_test(r: ConditionalOutputRanges, tie_rule: str = P0) -> Test:
    """The canonical consistent test: answer a label only where the output is
    compatible with that hypothesis, with `tie_rule` deciding the overlap."""
    only_p0 = r.r_p0.difference(r.r_p1)
    region = only_p0.union(r.overlap) if tie_rule == P0 else only_p0
    return Test(domain=r.r_y, p0_region=region, tie_rule=tie_rule)


def correct_set(t: Test, r: ConditionalOutputRanges) -> SetLike:
    """Outputs where the decision is guaranteed correct.

    An overlap output is never correct (both hypotheses remain possible), so
    the correct set is the part of each one-sided region where the test
    answers that side's label.
    """
    only_p0 = r.r_p0.difference(r.r_p1)
    only_p1 = r.r_p1.difference(r.r_p0)
    return only_p0.intersect(t.p0_region).union(only_p1.intersect(t.p1_region))


def performance(t: Test, r: ConditionalOutputRanges) -> float:
    """Log size of the test's correct set; -inf when it is empty."""
    return _log_size(correct_set(t, r))


def performance_bound(r: ConditionalOutputRanges) -> float:
    """Log size of the symmetric difference of the conditional ranges.

    No test can score above this; every consistent test meets it exactly.
    """
    return _log_size(r.sym_difference)


def _render(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


@dataclass(frozen=True)
class TestReport:
    """Evaluation summary of one test against one pair of conditional ranges."""

    aleph: SetLike
    performance: float
    bound: float
    normalized: float

    def __post_init__(self):
        if not self.performance <= self.bound + _BOUND_SLACK:
            raise ValueError("test performance exceeds the symmetric-difference bound")

    def to_json_dict(self) -> dict:
        return {"aleph": self.aleph.to_json_dict(),
                "performance": _render(self.performance),
                "bound": _render(self.bound),
                "normalized": _render(self.normalized)}


def test_report(t: Test, r: ConditionalOutputRanges) -> TestReport:
    aleph = correct_set(t, r)
    perf = _log_size(aleph)
    return TestReport(aleph=aleph,
                      performance=perf,
                      bound=performance_bound(r),
                      normalized=perf - r.output_entropy())


def ranges_from_world(w: FiniteWorld) -> ConditionalOutputRanges:
    """Discrete conditional output ranges computed from an explicit world."""
    hs = marginal_range(w, "H")
    if not (P0 in hs and P1 in hs):
        raise RangeError("world must attain both hypothesis labels")
    return ConditionalOutputRanges(r_p0=conditional_range(w, "Y", "H", P0),
                                   r_p1=conditional_range(w, "Y", "H", P1))


@dataclass(frozen=True)
class BruteForceResult:
    cardinality: int
    performance: float
    test: Test


def brute_force_optimum(w: FiniteWorld, cap: int = 16) -> BruteForceResult:
    """Exhaustive search over all decision rules on the output range.

    Evaluates every 2^|range(Y)| rule directly against the correctness
    definition (the set of hypothesis labels reachable from each output) and
    returns the best correct-set cardinality with one maximizer.  Ties go to
    the lexicographically smallest decision vector over the sorted outputs,
    so the witness is deterministic.
    """
    r_y = marginal_range(w, "Y")
    if r_y.cardinality > cap:
        raise ValueError(
            f"output range has {r_y.cardinality} values, above the cap of {cap}")
    ys = r_y.sorted_elements()
    reachable = {y: conditional_range(w, "H", "Y", y) for y in ys}
    best_count = -1
    best_vector: tuple[str, ...] | None = None
    for vector in itertools.product((P0, P1), repeat=len(ys)):
        count = sum(1 for y, lab in zip(ys, vector)
                    if reachable[y] == DiscreteSet([lab]))
        if count > best_count:
            best_count = count
            best_vector = vector
    assert best_vector is not None
    witness = Test(domain=r_y,
                   p0_region=DiscreteSet(y for y, lab in zip(ys, best_vector)
                                         if lab == P0))
    perf = math.log2(best_count) if best_count else -math.inf
    return BruteForceResult(cardinality=best_count, performance=perf, test=witness)
