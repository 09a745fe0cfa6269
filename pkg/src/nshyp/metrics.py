"""Utility metrics for sanitized tables: histograms, mean shift, KL divergence.

The KL divergence compares smoothed empirical bin distributions (counts
plus a small additive constant, renormalized) over a shared binning of the
policy's domain box.  Direction defaults to D(original || sanitized); pass
the histograms in the other order for the reverse reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataio import DataTable, sanitize_table
from .nset import NSet
from .privacy import StripPolicy


class MetricsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Histogram2D:
    """Counts over a uniform 2-D binning; bins are half-open except the last
    along each axis, which is closed so the box's far edge is kept."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray
    total: int
    discarded: int

    def same_binning(self, other: Histogram2D) -> bool:
        return (self.counts.shape == other.counts.shape
                and np.array_equal(self.x_edges, other.x_edges)
                and np.array_equal(self.y_edges, other.y_edges))


def _bin_index(values: np.ndarray, lo: float, hi: float, n: int) -> np.ndarray:
    idx = np.floor((values - lo) * n / (hi - lo)).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def histogram(points, box: NSet, bins_per_axis) -> Histogram2D:
    """Bin 2-D points over the box; out-of-box points land in the discard tally."""
    if box.dim != 2 or len(box.parts) != 1:
        raise MetricsError("histogram box must be a single 2-D box")
    (lo0, hi0), (lo1, hi1) = box.parts[0]
    if lo0 >= hi0 or lo1 >= hi1:
        raise MetricsError("histogram box must have positive side lengths")
    if isinstance(bins_per_axis, int):
        nx = ny = bins_per_axis
    else:
        nx, ny = bins_per_axis
    if nx < 1 or ny < 1:
        raise MetricsError("bins_per_axis must be >= 1")

    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    in_box = ((pts[:, 0] >= lo0) & (pts[:, 0] <= hi0)
              & (pts[:, 1] >= lo1) & (pts[:, 1] <= hi1))
    sel = pts[in_box]
    counts = np.zeros((nx, ny), dtype=np.int64)
    if sel.size:
        ix = _bin_index(sel[:, 0], lo0, hi0, nx)
        iy = _bin_index(sel[:, 1], lo1, hi1, ny)
        np.add.at(counts, (ix, iy), 1)
    return Histogram2D(x_edges=np.linspace(lo0, hi0, nx + 1),
                       y_edges=np.linspace(lo1, hi1, ny + 1),
                       counts=counts,
                       total=int(sel.shape[0]),
                       discarded=int(pts.shape[0] - sel.shape[0]))


def mean_diff(before: Sequence[float], after: Sequence[float]) -> float:
    """mean(after) - mean(before); signed."""
    b = np.asarray(before, dtype=np.float64)
    a = np.asarray(after, dtype=np.float64)
    if b.size == 0 or a.size == 0:
        raise MetricsError("mean_diff of empty columns is undefined")
    if b.size != a.size:
        raise MetricsError(f"column lengths differ: {b.size} vs {a.size}")
    return float(a.mean() - b.mean())


def kl_divergence(p: Histogram2D, q: Histogram2D,
                  smoothing_alpha: float = 1e-9) -> float:
    """KL(p || q) over smoothed bin frequencies (natural log, >= 0)."""
    if smoothing_alpha <= 0.0:
        raise MetricsError("smoothing_alpha must be positive")
    if not p.same_binning(q):
        raise MetricsError("histograms must share the same binning")
    nbins = p.counts.size
    ph = (p.counts.ravel() + smoothing_alpha) / (p.total + smoothing_alpha * nbins)
    qh = (q.counts.ravel() + smoothing_alpha) / (q.total + smoothing_alpha * nbins)
    return float(np.sum(ph * np.log(ph / qh)))


@dataclass(frozen=True)
class UtilityCurvePoint:
    rho: float
    mean_diff: float
    kl: float


def utility_curve(table: DataTable, policy: StripPolicy,
                  rho_values: Sequence[float], bins: int = 50,
                  alpha: float = 1e-9) -> list[UtilityCurvePoint]:
    """Sanitize the table at each accuracy level and score the damage.

    Per rho: mean shift of the protected coordinate and KL(original ||
    sanitized) over `bins` x `bins` histograms of the domain box.
    """
    if not rho_values:
        raise MetricsError("rho_values must be nonempty")
    rhos = [float(r) for r in rho_values]
    if any(not (math.isfinite(r) and r > 0) for r in rhos):
        raise MetricsError("rho values must be positive finite numbers")
    if any(b < a for a, b in zip(rhos, rhos[1:])):
        raise MetricsError("rho values must be sorted ascending")

    i = policy.protected_index - 1
    _, before_pts = table.complete_points()
    hist_before = histogram(before_pts, policy.domain_box, bins)
    out = []
    for rho in rhos:
        sanitized, _ = sanitize_table(table, policy.with_rho(rho))
        _, after_pts = sanitized.complete_points()
        hist_after = histogram(after_pts, policy.domain_box, bins)
        out.append(UtilityCurvePoint(
            rho=rho,
            mean_diff=mean_diff(before_pts[:, i], after_pts[:, i]),
            kl=kl_divergence(hist_before, hist_after, alpha)))
    return out
