"""Shared test helpers: independent oracles and random-input generators.

The oracles here deliberately avoid the library's own algorithms: matching
is checked by exhaustive enumeration, and the sampled RMSE is checked
against exact per-segment integration of the squared difference.
"""

from __future__ import annotations

import itertools
import math
import random

from reqquant.curves import Point, Quantification


def brute_force_assignment(weights: list[list[float]]) -> float:
    """Best total weight over all injective pairings of size min(n, m)."""
    n, m = len(weights), len(weights[0])
    best = -math.inf
    if n <= m:
        for cols in itertools.permutations(range(m), n):
            best = max(best, sum(weights[i][j] for i, j in enumerate(cols)))
    else:
        for rows in itertools.permutations(range(n), m):
            best = max(best, sum(weights[i][j] for j, i in enumerate(rows)))
    return best


def brute_force_p2p(points_a: list[Point], points_b: list[Point]) -> set[float]:
    """All defensible point-to-point totals: the matching must minimize the
    matched distance (found by enumeration); every minimizer's total of
    matched distance plus nearest-point penalties for its leftovers is a
    valid answer (minimizers are unique for generic inputs)."""
    def dist(a: Point, b: Point) -> float:
        return math.hypot(a.x - b.x, a.y - b.y)

    n, m = len(points_a), len(points_b)
    if n <= m:
        assignments = [list(enumerate(cols))
                       for cols in itertools.permutations(range(m), n)]
    else:
        assignments = [[(i, j) for j, i in enumerate(rows)]
                       for rows in itertools.permutations(range(n), m)]
    matched_totals = [sum(dist(points_a[i], points_b[j]) for i, j in pairs)
                      for pairs in assignments]
    best = min(matched_totals)
    totals = set()
    for pairs, matched in zip(assignments, matched_totals):
        if matched > best + 1e-12:
            continue
        total = matched
        matched_a = {i for i, _ in pairs}
        matched_b = {j for _, j in pairs}
        for i in range(n):
            if i not in matched_a:
                total += min(dist(points_a[i], b) for b in points_b)
        for j in range(m):
            if j not in matched_b:
                total += min(dist(points_b[j], a) for a in points_a)
        totals.add(total)
    return totals


def exact_squared_difference_integral(q1: Quantification, q2: Quantification) -> float:
    """Integral over [0, 1] of (f1 - f2)^2, exact per linear segment.

    The difference is linear between consecutive breakpoints; for a linear
    g with endpoint values a, b over width w the integral of g^2 is
    w * (a^2 + a*b + b^2) / 3.
    """
    xs = sorted({0.0, 1.0} | {p.x for p in q1.points} | {p.x for p in q2.points})
    total = 0.0
    for left, right in zip(xs, xs[1:]):
        a = q1.evaluate(left) - q2.evaluate(left)
        b = q1.evaluate(right) - q2.evaluate(right)
        total += (right - left) * (a * a + a * b + b * b) / 3.0
    return total


def random_quantification(rng: random.Random, max_points: int = 6,
                          x_range: tuple[float, float] = (0.0, 100.0)) -> Quantification:
    count = rng.randint(2, max_points)
    xs = sorted(rng.uniform(*x_range) for _ in range(count))
    while any(b - a < 1e-6 for a, b in zip(xs, xs[1:])):
        xs = sorted(rng.uniform(*x_range) for _ in range(count))
    return Quantification.of(*[(x, rng.random()) for x in xs])


def random_points(rng: random.Random, count: int,
                  x_range: tuple[float, float] = (0.0, 10.0)) -> list[Point]:
    return [Point(rng.uniform(*x_range), rng.random()) for _ in range(count)]
