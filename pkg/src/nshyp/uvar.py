"""Finite-sample-space workbench for uncertain variables.

An uncertain variable is a mapping from a sample space; it carries no
distribution, only the sets of values it can take.  FiniteWorld holds an
explicit finite sample space together with three such mappings (a source
variable X, a derived output Y and a binary hypothesis H) so that every
range-based statement can be checked by exhaustive enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable

from .nset import DiscreteSet, NSet

P0 = "p0"
P1 = "p1"
HYP_LABELS = (P0, P1)

_SELECTORS = ("X", "Y", "H")


class WorldError(ValueError):
    """Invalid FiniteWorld construction or query."""


def _as_hashable(v):
    return tuple(v) if isinstance(v, list) else v


@dataclass(frozen=True)
class FiniteWorld:
    """Explicit sample space with maps X, Y, H, one value per sample.

    Both Y and H must factor through X: samples with equal X values must
    agree on Y and on H.  Violations are rejected at construction with the
    offending sample pair named.
    """

    omega: tuple[Hashable, ...]
    x: tuple[Hashable, ...]
    y: tuple[Hashable, ...]
    h: tuple[str, ...]

    def __init__(self, omega, x, y, h):
        object.__setattr__(self, "omega", tuple(omega))
        object.__setattr__(self, "x", tuple(_as_hashable(v) for v in x))
        object.__setattr__(self, "y", tuple(_as_hashable(v) for v in y))
        object.__setattr__(self, "h", tuple(h))
        self._validate()

    def _validate(self) -> None:
        n = len(self.omega)
        if not (len(self.x) == len(self.y) == len(self.h) == n):
            raise WorldError("omega, X, Y, H must have equal lengths")
        if len(set(self.omega)) != n:
            raise WorldError("duplicate sample labels in omega")
        for lab in self.h:
            if lab not in HYP_LABELS:
                raise WorldError(f"hypothesis labels must be 'p0' or 'p1', got {lab!r}")
        seen: dict[Hashable, int] = {}
        for k, xv in enumerate(self.x):
            if xv in seen:
                j = seen[xv]
                if self.y[j] != self.y[k]:
                    raise WorldError(
                        f"Y does not factor through X: samples "
                        f"{self.omega[j]!r} and {self.omega[k]!r} share X={xv!r} "
                        f"but have Y={self.y[j]!r} vs {self.y[k]!r}")
                if self.h[j] != self.h[k]:
                    raise WorldError(
                        f"H does not factor through X: samples "
                        f"{self.omega[j]!r} and {self.omega[k]!r} share X={xv!r} "
                        f"but have H={self.h[j]!r} vs {self.h[k]!r}")
            else:
                seen[xv] = k

    def values(self, selector: str) -> tuple:
        if selector not in _SELECTORS:
            raise WorldError(f"selector must be one of {_SELECTORS}, got {selector!r}")
        return {"X": self.x, "Y": self.y, "H": self.h}[selector]

    def to_json_dict(self) -> dict:
        return {"omega": list(self.omega),
                "X": [list(v) if isinstance(v, tuple) else v for v in self.x],
                "Y": [list(v) if isinstance(v, tuple) else v for v in self.y],
                "H": list(self.h)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> FiniteWorld:
        return cls(obj["omega"], obj["X"], obj["Y"], obj["H"])


def marginal_range(w: FiniteWorld, selector: str) -> DiscreteSet:
    """Set of values the selected variable attains over the sample space."""
    if not w.omega:
        raise WorldError("marginal range of an empty sample space is undefined")
    return DiscreteSet(w.values(selector))


def conditional_range(w: FiniteWorld, target: str, given: str, value) -> DiscreteSet:
    """Values of `target` over samples where `given` equals `value`."""
    value = _as_hashable(value)
    given_vals = w.values(given)
    if value not in given_vals:
        raise WorldError(f"conditioning value {value!r} is not attained by {given}")
    target_vals = w.values(target)
    return DiscreteSet(t for t, g in zip(target_vals, given_vals) if g == value)


def joint_range(w: FiniteWorld, a: str, b: str) -> DiscreteSet:
    """Set of simultaneously attained value pairs of two variables."""
    if not w.omega:
        raise WorldError("joint range of an empty sample space is undefined")
    return DiscreteSet(zip(w.values(a), w.values(b)))


def is_unrelated(w: FiniteWorld, a: str, b: str) -> bool:
    """True iff the joint range is the full product of the marginal ranges."""
    joint = joint_range(w, a, b)
    ra = marginal_range(w, a)
    rb = marginal_range(w, b)
    return joint.cardinality == ra.cardinality * rb.cardinality


def is_unrelated_by_conditionals(w: FiniteWorld, a: str, b: str) -> bool:
    """Equivalent two-variable criterion: every conditional range of `a`
    given a value of `b` equals the full marginal range of `a`."""
    ra = marginal_range(w, a)
    return all(conditional_range(w, a, b, v) == ra
               for v in marginal_range(w, b).elements)


def entropy_h0(s: NSet) -> float:
    """Log Lebesgue measure of a continuous range (natural log).

    Returns -inf for an empty or measure-zero set.
    """
    m = s.measure
    return math.log(m) if m > 0.0 else -math.inf


def entropy_H0(s: DiscreteSet) -> float:
    """Log cardinality of a discrete range (base 2)."""
    if s.is_empty:
        raise ValueError("entropy of an empty discrete set is undefined")
    return math.log2(s.cardinality)
