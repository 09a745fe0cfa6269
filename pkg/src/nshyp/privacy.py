"""Privacy calculus for deterministic reporting policies.

A strip policy snaps any point whose protected coordinate lies within 1/rho
of a declared boundary surface onto that surface and reports everything else
unchanged.  Its accuracy guarantee is structural (no report moves farther
than 1/rho); its privacy guarantee epsilon is the fraction of the domain box
covered by the strip around the boundary.  This module computes that strip
measure by adaptive quadrature (or quasi-Monte Carlo above three
dimensions), evaluates the privacy measure for explicit range pairs, and
sweeps epsilon across accuracy levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _core
from .expr import BoundaryExpr, compile_program, evaluate
from .nset import DiscreteSet, NSet
from .uvar import entropy_h0, entropy_H0


class PolicyError(ValueError):
    """Invalid policy definition or policy-level precondition."""


class QuadratureError(RuntimeError):
    """The strip integrand could not be evaluated reliably."""


@dataclass(frozen=True)
class QuadratureParams:
    """Knobs for the strip-measure computation.

    rel_tol and max_depth drive the adaptive Simpson rule used up to three
    dimensions; the mc_* fields drive the seeded quasi-Monte Carlo estimate
    used above that.  scan_points controls the pre-scan that sizes the
    tolerance and locates the clamp kinks of the integrand.
    """

    rel_tol: float = 1e-8
    max_depth: int = 40
    scan_points: int = 1025
    mc_samples: int = 8192
    mc_replicates: int = 4
    seed: int = 0


DEFAULT_QUADRATURE = QuadratureParams()


@dataclass(frozen=True)
class StripPolicy:
    """Boundary-projection reporting policy on a box domain.

    Points with |x_i - g(x_others)| <= 1/rho report g(x_others) in place of
    coordinate i; all other points report unchanged.  The map is total on
    R^dim: out-of-box points are transformed too (callers count them).
    """

    domain_box: NSet
    protected_index: int  # 1-based, matching x1..xn in the boundary expression
    boundary: BoundaryExpr
    rho: float

    def __post_init__(self):
        box = self.domain_box
        if len(box.parts) != 1 or any(lo >= hi for lo, hi in box.parts[0]):
            raise PolicyError("domain must be a single box with positive side lengths")
        if not (1 <= self.protected_index <= box.dim):
            raise PolicyError(
                f"protected_index {self.protected_index} out of range for "
                f"dimension {box.dim}")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise PolicyError("rho must be a positive finite number")
        if self.boundary.dim != box.dim:
            raise PolicyError(
                f"boundary expression declares dimension {self.boundary.dim}, "
                f"domain has {box.dim}")
        if self.protected_index in self.boundary.referenced_indices():
            raise PolicyError(
                f"boundary expression must not reference the protected "
                f"coordinate x{self.protected_index}")

    @property
    def dim(self) -> int:
        return self.domain_box.dim

    @property
    def half_width(self) -> float:
        """Worst-case report perturbation, 1/rho."""
        return 1.0 / self.rho

    def with_rho(self, rho: float) -> StripPolicy:
        return replace(self, rho=float(rho))

    @cached_property
    def _program(self):
        return compile_program(self.boundary)

    @classmethod
    def from_config(cls, cfg: dict, require_rho: bool = True) -> StripPolicy:
        """Build from a config mapping; raises PolicyError naming any missing
        or malformed field.

        Schema: {"box": [[lo, hi], ...], "protected_index": int,
                 "boundary": "<expression>", "rho": float}.
        """
        from .expr import parse

        for field_name in ("box", "protected_index", "boundary"):
            if field_name not in cfg:
                raise PolicyError(f"policy config is missing required field {field_name!r}")
        if require_rho and "rho" not in cfg:
            raise PolicyError("policy config is missing required field 'rho'")
        try:
            box = NSet.box([tuple(map(float, side)) for side in cfg["box"]])
        except (TypeError, ValueError) as exc:
            raise PolicyError(f"invalid 'box' in policy config: {exc}") from exc
        if not isinstance(cfg["boundary"], str):
            raise PolicyError("policy config field 'boundary' must be a string")
        boundary = parse(cfg["boundary"], box.dim)
        rho = float(cfg.get("rho", 1.0))
        return cls(domain_box=box, protected_index=int(cfg["protected_index"]),
                   boundary=boundary, rho=rho)

    def to_config(self) -> dict:
        return {"box": [list(s) for s in self.domain_box.parts[0]],
                "protected_index": self.protected_index,
                "boundary": self.boundary.pretty(),
                "rho": self.rho}


@dataclass(frozen=True)
class PolicyGuarantee:
    """Certified operating point of a strip policy.

    epsilon is the strip measure over the domain measure; it lies in (0, 1]
    whenever the strip meets the box with positive measure (0 only in the
    degenerate case of a boundary surface that misses the box entirely).
    """

    rho: float
    epsilon: float
    strip_measure: float
    domain_measure: float
    quadrature_error_estimate: float

    def to_json_dict(self) -> dict:
        return {"rho": self.rho, "epsilon": self.epsilon,
                "strip_measure": self.strip_measure,
                "domain_measure": self.domain_measure,
                "quadrature_error_estimate": self.quadrature_error_estimate}


def boundary_value(p: StripPolicy, x: Sequence[float]) -> float:
    """g(x_others) via the kernel VM, with strict diagnostics on domain errors."""
    pt = np.asarray(x, dtype=np.float64)
    prog = p._program
    g = _core.eval_program(prog.codes, prog.operands, pt)
    if not math.isfinite(g):
        # re-evaluate strictly to name the failure (division by zero, ...)
        evaluate(p.boundary, pt)
        raise PolicyError("boundary expression produced a non-finite value")
    return g


def apply_policy(p: StripPolicy, x: Sequence[float]) -> tuple[float, ...]:
    """Report a point under the policy; only coordinate i can change, and
    never by more than 1/rho."""
    xs = tuple(float(v) for v in x)
    if len(xs) != p.dim:
        raise PolicyError(f"point has dimension {len(xs)}, policy has {p.dim}")
    g = boundary_value(p, xs)
    i = p.protected_index - 1
    if g - p.half_width <= xs[i] <= g + p.half_width:
        return xs[:i] + (g,) + xs[i + 1:]
    return xs


def measured_accuracy(p: StripPolicy, points: Iterable[Sequence[float]]) -> float:
    """Largest Euclidean perturbation the policy applies over the points."""
    worst = 0.0
    for x in points:
        xs = tuple(float(v) for v in x)
        moved = apply_policy(p, xs)
        worst = max(worst, math.dist(xs, moved))
    return worst


def is_rho_accurate(p: StripPolicy, points: Iterable[Sequence[float]]) -> bool:
    """True iff no point moves farther than 1/rho (holds by construction)."""
    return measured_accuracy(p, points) <= p.half_width


# -- strip measure ----------------------------------------------------------


def _width_grid(p: StripPolicy, pts: np.ndarray) -> np.ndarray:
    prog = p._program
    box = p.domain_box.parts[0]
    lo_i, hi_i = box[p.protected_index - 1]
    w = _core.strip_width_many(prog.codes, prog.operands, pts, lo_i, hi_i,
                               p.half_width)
    if not np.all(np.isfinite(w)):
        raise QuadratureError(
            "boundary expression produced a non-finite value inside the domain box")
    return w


def _bisect_crossing(scalar_g, lo, hi, flo, fhi):
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = scalar_g(mid)
        if fm == 0.0:
            return mid
        if (flo < 0.0) != (fm < 0.0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= 0.0:
            break
    return 0.5 * (lo + hi)


def _clamp_splits(p: StripPolicy, free_var: int, a: float, b: float,
                  grid: np.ndarray, g: np.ndarray, template: np.ndarray
                  ) -> list[float]:
    """Parameter values where a clamp of the width integrand kicks in or out.

    Found by sign-change scanning of g against the four clamp levels,
    refined by bisection; undetectable crossings are left to adaptivity.
    """
    prog = p._program
    lo_i, hi_i = p.domain_box.parts[0][p.protected_index - 1]
    hw = p.half_width
    template = template.copy()

    def scalar_g(t: float) -> float:
        template[free_var] = t
        return _core.eval_program(prog.codes, prog.operands, template)

    splits: list[float] = []
    for level in (lo_i - hw, lo_i + hw, hi_i - hw, hi_i + hw):
        f = g - level
        sign_change = np.nonzero(np.signbit(f[:-1]) != np.signbit(f[1:]))[0]
        for k in sign_change:
            root = _bisect_crossing(lambda t: scalar_g(t) - level,
                                    grid[k], grid[k + 1], f[k], f[k + 1])
            if a < root < b:
                splits.append(root)
    splits.sort()
    dedup: list[float] = []
    min_gap = 1e-12 * (b - a)
    for s in splits:
        if not dedup or s - dedup[-1] > min_gap:
            dedup.append(s)
    return dedup


def _integrate_one_free(p: StripPolicy, free_var: int, quad: QuadratureParams,
                        template: np.ndarray, abs_tol: float | None = None
                        ) -> tuple[float, float]:
    box = p.domain_box.parts[0]
    a, b = box[free_var]
    lo_i, hi_i = box[p.protected_index - 1]
    prog = p._program

    grid = np.linspace(a, b, quad.scan_points)
    pts = np.tile(template, (quad.scan_points, 1))
    pts[:, free_var] = grid
    g = _core.eval_program_many(prog.codes, prog.operands, pts)
    if not np.all(np.isfinite(g)):
        raise QuadratureError(
            "boundary expression produced a non-finite value inside the domain box")
    w = _width_grid(p, pts)
    scan_estimate = float(np.trapezoid(w, grid)) if hasattr(np, "trapezoid") \
        else float(np.trapz(w, grid))
    if abs_tol is None:
        abs_tol = quad.rel_tol * max(scan_estimate, 1e-12)

    edges = [a] + _clamp_splits(p, free_var, a, b, grid, g, template) + [b]
    total = 0.0
    err = 0.0
    for u, v in zip(edges, edges[1:]):
        piece_tol = abs_tol * (v - u) / (b - a)
        val, e = _core.integrate_strip_width(prog.codes, prog.operands, template,
                                             free_var, u, v, lo_i, hi_i,
                                             p.half_width, piece_tol,
                                             quad.max_depth)
        if not (math.isfinite(val) and math.isfinite(e)):
            raise QuadratureError(
                "boundary expression produced a non-finite value inside the domain box")
        total += val
        err += e
    return total, err


def _integrate_two_free(p: StripPolicy, free: list[int], quad: QuadratureParams
                        ) -> tuple[float, float]:
    box = p.domain_box.parts[0]
    outer, inner = free
    a0, b0 = box[outer]
    a1, b1 = box[inner]

    # coarse scan for finiteness and a tolerance scale
    n = 65
    t0, t1 = np.meshgrid(np.linspace(a0, b0, n), np.linspace(a1, b1, n),
                         indexing="ij")
    pts = np.zeros((n * n, p.dim))
    pts[:, outer] = t0.ravel()
    pts[:, inner] = t1.ravel()
    w = _width_grid(p, pts).reshape(n, n)
    scan_estimate = float(w.mean() * (b0 - a0) * (b1 - a1))
    abs_tol = quad.rel_tol * max(scan_estimate, 1e-12)
    inner_tol = 0.1 * abs_tol / (b0 - a0)

    template = np.zeros(p.dim)
    inner_err_worst = 0.0

    def profile(t: float) -> float:
        nonlocal inner_err_worst
        template[outer] = t
        val, e = _integrate_one_free(p, inner, quad, template.copy(),
                                     abs_tol=inner_tol * (b1 - a1))
        inner_err_worst = max(inner_err_worst, e)
        return val

    value, outer_err = _adaptive_simpson(profile, a0, b0, abs_tol, quad.max_depth)
    return value, outer_err + inner_err_worst * (b0 - a0)


def _adaptive_simpson(f, a: float, b: float, abs_tol: float, max_depth: int
                      ) -> tuple[float, float]:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    err_total = 0.0

    def adapt(a, b, fa, fm, fb, whole, tol, depth):
        nonlocal err_total
        m = 0.5 * (a + b)
        flm = f(0.5 * (a + m))
        frm = f(0.5 * (m + b))
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        d = left + right - whole
        if depth <= 0 or abs(d) <= 15.0 * tol:
            err_total += abs(d) / 15.0
            return left + right + d / 15.0
        return (adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    value = adapt(a, b, fa, fm, fb, whole, abs_tol, max_depth)
    return value, err_total


def _integrate_qmc(p: StripPolicy, free: list[int], quad: QuadratureParams
                   ) -> tuple[float, float]:
    from scipy.stats import qmc

    box = p.domain_box.parts[0]
    lo = np.array([box[k][0] for k in free])
    hi = np.array([box[k][1] for k in free])
    vol_free = float(np.prod(hi - lo))
    estimates = []
    for rep in range(quad.mc_replicates):
        engine = qmc.Sobol(d=len(free), scramble=True, seed=quad.seed + rep)
        u = engine.random(quad.mc_samples)
        pts = np.zeros((quad.mc_samples, p.dim))
        pts[:, free] = lo + u * (hi - lo)
        w = _width_grid(p, pts)
        estimates.append(float(w.mean()) * vol_free)
    value = float(np.mean(estimates))
    spread = float(np.std(estimates, ddof=1)) if len(estimates) > 1 else 0.0
    return value, 2.0 * spread / math.sqrt(max(len(estimates), 1))


def strip_measure(p: StripPolicy, quad: QuadratureParams = DEFAULT_QUADRATURE
                  ) -> tuple[float, float]:
    """Measure of the box region within 1/rho of the boundary surface.

    Deterministic adaptive Simpson per free coordinate up to dimension
    three, seeded quasi-Monte Carlo beyond.  Returns (value, error
    estimate); the value is clamped to [0, measure(domain)].

    Raises QuadratureError if the boundary expression is non-finite
    anywhere it was evaluated inside the box.
    """
    box = p.domain_box.parts[0]
    i = p.protected_index - 1
    free = [k for k in range(p.dim) if k != i]
    domain = p.domain_box.measure

    if not free:
        template = np.zeros(1)
        w = _width_grid(p, template.reshape(1, 1))
        value, err = float(w[0]), 0.0
    elif len(free) == 1:
        value, err = _integrate_one_free(p, free[0], quad, np.zeros(p.dim))
    elif len(free) == 2:
        value, err = _integrate_two_free(p, free, quad)
    else:
        value, err = _integrate_qmc(p, free, quad)

    return min(max(value, 0.0), domain), err


def epsilon_guarantee(p: StripPolicy, quad: QuadratureParams = DEFAULT_QUADRATURE
                      ) -> PolicyGuarantee:
    """Certify the policy: epsilon is the strip measure over the domain measure."""
    domain = p.domain_box.measure
    if domain <= 0.0:
        raise PolicyError("domain box has zero measure")
    strip, err = strip_measure(p, quad)
    return PolicyGuarantee(rho=p.rho, epsilon=strip / domain, strip_measure=strip,
                           domain_measure=domain,
                           quadrature_error_estimate=err)


def sweep_epsilon(p: StripPolicy, rho_values: Sequence[float],
                  quad: QuadratureParams = DEFAULT_QUADRATURE
                  ) -> list[PolicyGuarantee]:
    """Guarantees across accuracy levels; rho_values must be positive and
    sorted ascending.  Epsilon is nonincreasing along the result."""
    if not rho_values:
        raise PolicyError("rho_values must be nonempty")
    rhos = [float(r) for r in rho_values]
    if any(not (math.isfinite(r) and r > 0) for r in rhos):
        raise PolicyError("rho values must be positive finite numbers")
    if any(b < a for a, b in zip(rhos, rhos[1:])):
        raise PolicyError("rho values must be sorted ascending")
    return [epsilon_guarantee(p.with_rho(r), quad) for r in rhos]


# -- privacy measure --------------------------------------------------------


def priv_measure(r_y, r_p0, r_p1) -> float:
    """Output entropy minus the log size of the conditional ranges' symmetric
    difference; +inf when the difference is empty (no test can distinguish)."""
    continuous = isinstance(r_y, NSet)
    if continuous != (isinstance(r_p0, NSet) and isinstance(r_p1, NSet)):
        raise PolicyError("range arguments must all be NSet or all DiscreteSet")
    if r_y.is_empty:
        raise PolicyError("output range must be nonempty")
    if r_p0.union(r_p1) != r_y:
        raise PolicyError("output range must equal the union of the conditional ranges")
    delta = r_p0.symdiff(r_p1)
    if continuous:
        h = entropy_h0(r_y)
        d = entropy_h0(delta)
    else:
        h = entropy_H0(r_y)
        d = math.log2(delta.cardinality) if delta.cardinality else -math.inf
    if d == -math.inf:
        return math.inf
    return h - d


def is_eps_private(priv: float, eps: float) -> bool:
    """True iff the privacy measure meets the log(eps) threshold, eps in (0, 1]."""
    if not (0.0 < eps <= 1.0):
        raise PolicyError(f"eps must lie in (0, 1], got {eps}")
    return priv >= math.log(eps)
