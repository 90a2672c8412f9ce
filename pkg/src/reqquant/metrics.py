"""Distance metrics between a produced curve and a ground-truth curve.

All four metrics first map both curves onto a shared unit domain (affine
over the union of their x ranges).  Point-to-point distance works on the
inflection-point sets through the same maximum-weight matching used for
edit extraction; the other three compare the functions themselves.
Smaller is better for every metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analogy import Matching, km_match, point_distance
from .curves import Point, Quantification


class MetricError(ValueError):
    """The metric's preconditions do not hold for these curves."""


@dataclass(frozen=True)
class MetricReport:
    p2p: float
    chebyshev: float
    rmse: float
    iad: float
    matching: Matching

    def to_dict(self) -> dict:
        return {"p2p": self.p2p, "chebyshev": self.chebyshev,
                "rmse": self.rmse, "iad": self.iad}


def normalize_domain(q1: Quantification, q2: Quantification) -> tuple[Quantification, Quantification]:
    """Map x affinely so the union of both x ranges becomes [0, 1]."""
    lo = min(q1.points[0].x, q2.points[0].x)
    hi = max(q1.points[-1].x, q2.points[-1].x)
    width = hi - lo
    if width <= 0:
        raise MetricError("curves span a zero-width x range; cannot normalize")

    def rescale(q: Quantification) -> Quantification:
        return Quantification(tuple(Point((p.x - lo) / width, p.y) for p in q.points))

    return rescale(q1), rescale(q2)


def _sample(q: Quantification, xs: np.ndarray) -> np.ndarray:
    return np.interp(xs, [p.x for p in q.points], [p.y for p in q.points])


def p2p(q1: Quantification, q2: Quantification) -> float:
    """Total inflection-point distance under the optimal matching.

    Matched pairs contribute their Euclidean distance; with unequal point
    counts every unmatched point adds its distance to the nearest point of
    the other curve, so differing precision is penalized rather than
    silently ignored.
    """
    return _p2p_with_matching(q1, q2)[0]


def _p2p_with_matching(q1: Quantification, q2: Quantification) -> tuple[float, Matching]:
    n1, n2 = normalize_domain(q1, q2)
    matching = km_match(n1.points, n2.points)
    total = -matching.total_weight
    for i in matching.unmatched_source:
        total += min(point_distance(n1.points[i], p) for p in n2.points)
    for j in matching.unmatched_target:
        total += min(point_distance(n2.points[j], p) for p in n1.points)
    return total, matching


def _breakpoints(n1: Quantification, n2: Quantification) -> np.ndarray:
    xs = {0.0, 1.0}
    xs.update(p.x for p in n1.points)
    xs.update(p.x for p in n2.points)
    return np.array(sorted(xs))


def chebyshev(q1: Quantification, q2: Quantification) -> float:
    """Worst-case vertical gap max |f1(x) - f2(x)|, evaluated exactly: the
    difference of two piecewise-linear functions peaks at a breakpoint."""
    n1, n2 = normalize_domain(q1, q2)
    xs = _breakpoints(n1, n2)
    return float(np.max(np.abs(_sample(n1, xs) - _sample(n2, xs))))


def rmse(q1: Quantification, q2: Quantification, n_samples: int = 1000) -> float:
    """Root mean square of the vertical gaps over uniform samples of the
    normalized domain (endpoints included)."""
    if n_samples < 2:
        raise MetricError("rmse needs at least 2 samples")
    n1, n2 = normalize_domain(q1, q2)
    xs = np.linspace(0.0, 1.0, n_samples)
    diff = _sample(n1, xs) - _sample(n2, xs)
    return float(math.sqrt(float(np.mean(diff * diff))))


def _area(q: Quantification) -> float:
    """Exact area under the curve over [0, 1], flat beyond the outer points."""
    pts = q.points
    area = pts[0].y * (pts[0].x - 0.0)
    for a, b in zip(pts, pts[1:]):
        area += (a.y + b.y) / 2.0 * (b.x - a.x)
    area += pts[-1].y * (1.0 - pts[-1].x)
    return area


def iad(q1: Quantification, q2: Quantification) -> float:
    """Absolute difference of the areas enclosed with the x axis."""
    n1, n2 = normalize_domain(q1, q2)
    return abs(_area(n1) - _area(n2))


def compare(q1: Quantification, q2: Quantification,
            n_samples: int = 1000) -> MetricReport:
    """All four metrics plus the point matching used by the first one."""
    total, matching = _p2p_with_matching(q1, q2)
    return MetricReport(total, chebyshev(q1, q2), rmse(q1, q2, n_samples),
                        iad(q1, q2), matching)


def cognitive_overhead_ratio(counts_a: Sequence[float],
                             counts_b: Sequence[float]) -> float:
    """Mean interaction count of method A over method B's; below 1 means A
    needed fewer rounds for the same quality."""
    if len(counts_a) == 0 or len(counts_b) == 0:
        raise MetricError("interaction counts must be non-empty")
    if len(counts_a) != len(counts_b):
        raise MetricError("interaction count vectors must have equal length")
    mean_b = sum(counts_b) / len(counts_b)
    if mean_b == 0:
        raise MetricError("comparison method has zero mean interaction count")
    return (sum(counts_a) / len(counts_a)) / mean_b
