"""Exact set algebra and Lebesgue measure for finite unions of axis-aligned boxes.

Values are immutable and canonical: every constructor disjointifies and
sorts its parts, so two sets that are equal as point sets compare equal
structurally.  Boundary convention: proper sides are half-open [lo, hi).
Closed/open endpoint choices made by callers are normalized away; they never
change any measure.  Degenerate sides (lo == hi) are kept as closed points:
they contribute nothing to the measure but are honored by `contains`.

Set difference waives measure-zero subtrahends: subtracting a degenerate
part from a proper part leaves the proper part unchanged.  Consequently all
operations are exact up to sets of measure zero, which is the resolution
the measure-based quantities downstream can see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Side = tuple[float, float]
Box = tuple[Side, ...]


class DimensionMismatchError(ValueError):
    """Operands of a set operation have different dimensions."""


def _check_side(lo: float, hi: float) -> Side:
    lo = float(lo)
    hi = float(hi)
    if math.isnan(lo) or math.isnan(hi) or math.isinf(lo) or math.isinf(hi):
        raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
    if lo > hi:
        raise ValueError(f"interval lower bound exceeds upper bound: [{lo}, {hi}]")
    return (lo, hi)


@dataclass(frozen=True)
class Interval:
    """A single interval with explicit endpoint closedness.

    Used as construction input; inside an NSet it is normalized to the
    half-open convention (a degenerate interval survives only if closed on
    both ends, in which case it is a point).
    """

    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = True

    def __post_init__(self):
        _check_side(self.lo, self.hi)

    @property
    def measure(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        if self.lo < x < self.hi:
            return True
        if x == self.lo and self.closed_lo:
            return True
        return x == self.hi and self.closed_hi

    def _normalized(self) -> Side | None:
        """Half-open side, a point side, or None when empty."""
        if self.lo == self.hi:
            return (self.lo, self.hi) if (self.closed_lo and self.closed_hi) else None
        return (self.lo, self.hi)


def _side_is_point(s: Side) -> bool:
    return s[0] == s[1]


def _side_contains(s: Side, x: float) -> bool:
    lo, hi = s
    if lo == hi:
        return x == lo
    return lo <= x < hi


def _side_inter(a: Side, b: Side) -> Side | None:
    lo = max(a[0], b[0])
    hi = min(a[1], b[1])
    if lo > hi:
        return None
    if lo == hi:
        return (lo, hi) if (_side_contains(a, lo) and _side_contains(b, lo)) else None
    return (lo, hi)


def _side_minus(s: Side, t: Side) -> tuple[list[Side], Side | None]:
    """Split s into (parts outside t, overlap with t).

    Overlap None means "treat as disjoint along this axis"; that is exact
    except when t is a point inside a proper s, where the measure-zero
    waiver applies.
    """
    if _side_is_point(s):
        return ([], s) if _side_contains(t, s[0]) else ([s], None)
    if _side_is_point(t):
        return ([s], None)
    lo = max(s[0], t[0])
    hi = min(s[1], t[1])
    if lo >= hi:
        return ([s], None)
    rem = []
    if s[0] < lo:
        rem.append((s[0], lo))
    if hi < s[1]:
        rem.append((hi, s[1]))
    return (rem, (lo, hi))


def _box_inter(a: Box, b: Box) -> Box | None:
    sides = []
    for sa, sb in zip(a, b):
        s = _side_inter(sa, sb)
        if s is None:
            return None
        sides.append(s)
    return tuple(sides)


def _box_minus(a: Box, b: Box) -> list[Box]:
    if _box_inter(a, b) is None:
        return [a]
    out: list[Box] = []
    cur = list(a)
    for k in range(len(a)):
        rem, overlap = _side_minus(cur[k], b[k])
        for r in rem:
            out.append(tuple(cur[:k]) + (r,) + tuple(cur[k + 1 :]))
        if overlap is None:
            out.append(tuple(cur))
            return out
        cur[k] = overlap
    return out


def _merge_1d(sides: list[Side]) -> list[Side]:
    """Canonical 1-D union of proper half-open sides."""
    sides = sorted(sides)
    merged: list[Side] = []
    for lo, hi in sides:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def _disjointify(dim: int, boxes: list[Box]) -> list[Box]:
    """Canonical decomposition of a union of proper boxes.

    1-D: sort and merge.  n-D: slice along the first coordinate at every
    breakpoint, canonicalize the cross-sections recursively, then re-merge
    adjacent slabs with identical cross-sections.  The slab boundaries that
    survive are exactly the points where the cross-section changes, so the
    output depends only on the union as a point set.
    """
    if not boxes:
        return []
    if dim == 1:
        return [((lo, hi),) for lo, hi in _merge_1d([b[0] for b in boxes])]
    cuts = sorted({v for b in boxes for v in b[0]})
    slabs: list[tuple[float, float, tuple[Box, ...]]] = []
    for u, v in zip(cuts, cuts[1:]):
        cross = [b[1:] for b in boxes if b[0][0] <= u and v <= b[0][1]]
        if not cross:
            continue
        canon = tuple(_disjointify(dim - 1, cross))
        if slabs and slabs[-1][1] == u and slabs[-1][2] == canon:
            slabs[-1] = (slabs[-1][0], v, canon)
        else:
            slabs.append((u, v, canon))
    out: list[Box] = []
    for u, v, cross in slabs:
        for rest in cross:
            out.append(((u, v),) + rest)
    return out


def _subtract_all(parts: Iterable[Box], cutters: Iterable[Box]) -> list[Box]:
    rem = list(parts)
    for c in cutters:
        rem = [piece for r in rem for piece in _box_minus(r, c)]
    return rem


def _canon_degenerate(dim: int, boxes: list[Box]) -> list[Box]:
    """Canonicalize a union of degenerate boxes (each has >= 1 point side).

    Boxes are grouped by their point coordinates and values; the proper
    coordinates of each group form a lower-dimensional set that is
    canonicalized recursively.  Groups with fewer point coordinates are
    higher-dimensional, so later groups are trimmed against earlier ones.
    """
    groups: dict[tuple[tuple[int, ...], tuple[float, ...]], list[Box]] = {}
    for b in boxes:
        mask = tuple(k for k, s in enumerate(b) if _side_is_point(s))
        vals = tuple(b[k][0] for k in mask)
        groups.setdefault((mask, vals), []).append(b)

    accepted: list[Box] = []
    order = sorted(groups, key=lambda key: (len(key[0]), key))
    for mask, vals in order:
        group = groups[(mask, vals)]
        trimmed = _subtract_all(group, accepted)
        if not trimmed:
            continue
        free = [k for k in range(dim) if k not in mask]
        if not free:
            lifted = [trimmed[0]]
        else:
            projected = [tuple(b[k] for k in free) for b in trimmed]
            proper = [p for p in projected if all(not _side_is_point(s) for s in p)]
            lower = [p for p in projected if any(_side_is_point(s) for s in p)]
            canon = _disjointify(len(free), proper)
            canon += _canon_degenerate(len(free), lower)
            lifted = []
            for p in canon:
                sides: list[Side] = []
                it = iter(p)
                for k in range(dim):
                    sides.append((vals[mask.index(k)],) * 2 if k in mask else next(it))
                lifted.append(tuple(sides))
        accepted.extend(lifted)
    return accepted


def _canonicalize(dim: int, boxes: Iterable[Box]) -> tuple[Box, ...]:
    proper = []
    degenerate = []
    for b in boxes:
        if len(b) != dim:
            raise DimensionMismatchError(f"box has {len(b)} sides, expected {dim}")
        if any(_side_is_point(s) for s in b):
            degenerate.append(b)
        else:
            proper.append(b)
    parts = _disjointify(dim, proper)
    if degenerate:
        parts += _canon_degenerate(dim, _subtract_all(degenerate, parts))
    return tuple(sorted(parts))


@dataclass(frozen=True)
class NSet:
    """A finite union of pairwise-disjoint axis-aligned boxes, canonically stored."""

    dim: int
    parts: tuple[Box, ...] = field(default=())

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, dim: int = 1) -> NSet:
        return cls(dim, ())

    @classmethod
    def from_boxes(cls, dim: int, boxes: Iterable[Sequence]) -> NSet:
        """Build from raw boxes: each box is a sequence of dim (lo, hi) pairs
        or Interval objects.  A raw (a, a) side denotes the point {a}."""
        norm: list[Box] = []
        for raw in boxes:
            sides: list[Side] = []
            empty = False
            for side in raw:
                if isinstance(side, Interval):
                    s = side._normalized()
                    if s is None:
                        empty = True
                        break
                    sides.append(s)
                else:
                    lo, hi = side
                    sides.append(_check_side(lo, hi))
            if not empty:
                norm.append(tuple(sides))
        return cls(dim, _canonicalize(dim, norm))

    @classmethod
    def box(cls, sides: Sequence) -> NSet:
        return cls.from_boxes(len(sides), [sides])

    @classmethod
    def interval(cls, lo: float, hi: float) -> NSet:
        return cls.from_boxes(1, [[(lo, hi)]])

    @classmethod
    def from_intervals(cls, intervals: Iterable) -> NSet:
        """1-D union from (lo, hi) pairs or Interval objects."""
        return cls.from_boxes(1, [[iv] for iv in intervals])

    # -- queries -----------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def measure(self) -> float:
        """Lebesgue measure: exact sum of box volumes of the canonical parts."""
        return math.fsum(math.prod(hi - lo for lo, hi in b) for b in self.parts)

    def contains(self, point) -> bool:
        if self.dim == 1 and not hasattr(point, "__len__"):
            point = (point,)
        if len(point) != self.dim:
            raise DimensionMismatchError(
                f"point has dimension {len(point)}, set has dimension {self.dim}")
        return any(all(_side_contains(s, float(x)) for s, x in zip(b, point))
                   for b in self.parts)

    def __contains__(self, point) -> bool:
        return self.contains(point)

    def hull(self) -> Box | None:
        """Bounding box of the set, or None when empty."""
        if not self.parts:
            return None
        return tuple((min(b[k][0] for b in self.parts), max(b[k][1] for b in self.parts))
                     for k in range(self.dim))

    # -- algebra -----------------------------------------------------------

    def _check_dim(self, other: NSet) -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}")

    def union(self, other: NSet) -> NSet:
        self._check_dim(other)
        return NSet(self.dim, _canonicalize(self.dim, self.parts + other.parts))

    def intersect(self, other: NSet) -> NSet:
        self._check_dim(other)
        hits = []
        for a in self.parts:
            for b in other.parts:
                s = _box_inter(a, b)
                if s is not None:
                    hits.append(s)
        return NSet(self.dim, _canonicalize(self.dim, hits))

    def difference(self, other: NSet) -> NSet:
        self._check_dim(other)
        return NSet(self.dim,
                    _canonicalize(self.dim, _subtract_all(self.parts, other.parts)))

    def symdiff(self, other: NSet) -> NSet:
        return self.difference(other).union(other.difference(self))

    def issubset(self, other: NSet) -> bool:
        return self.difference(other).is_empty

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symdiff

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "parts": [[list(s) for s in b] for b in self.parts]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> NSet:
        return cls.from_boxes(int(obj["dim"]), obj["parts"])

    def __repr__(self) -> str:
        if not self.parts:
            return f"NSet.empty({self.dim})"
        body = " | ".join(
            "x".join(f"[{lo:g},{hi:g})" if lo < hi else f"{{{lo:g}}}" for lo, hi in b)
            for b in self.parts)
        return f"<NSet dim={self.dim} {body}>"


def _sort_key(x):
    return (type(x).__name__, repr(x))


@dataclass(frozen=True)
class DiscreteSet:
    """A finite set of labeled points with counting-measure semantics."""

    elements: frozenset = field(default_factory=frozenset)

    def __init__(self, elements: Iterable = ()):  # accept any iterable
        object.__setattr__(self, "elements", frozenset(elements))

    @property
    def cardinality(self) -> int:
        return len(self.elements)

    @property
    def is_empty(self) -> bool:
        return not self.elements

    def contains(self, x) -> bool:
        return x in self.elements

    def __contains__(self, x) -> bool:
        return x in self.elements

    def union(self, other: DiscreteSet) -> DiscreteSet:
        return DiscreteSet(self.elements | other.elements)

    def intersect(self, other: DiscreteSet) -> DiscreteSet:
        return DiscreteSet(self.elements & other.elements)

    def difference(self, other: DiscreteSet) -> DiscreteSet:
        return DiscreteSet(self.elements - other.elements)

    def symdiff(self, other: DiscreteSet) -> DiscreteSet:
        return DiscreteSet(self.elements ^ other.elements)

    def issubset(self, other: DiscreteSet) -> bool:
        return self.elements <= other.elements

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symdiff

    def sorted_elements(self) -> list:
        """Elements in a deterministic order (natural when comparable)."""
        try:
            return sorted(self.elements)
        except TypeError:
            return sorted(self.elements, key=_sort_key)

    def to_json_dict(self) -> dict:
        return {"elements": [list(e) if isinstance(e, tuple) else e
                             for e in self.sorted_elements()]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> DiscreteSet:
        return cls(tuple(e) if isinstance(e, list) else e for e in obj["elements"])

    def __repr__(self) -> str:
        return f"DiscreteSet({self.sorted_elements()!r})"
