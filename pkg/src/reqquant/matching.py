"""Maximum-weight assignment between two vertex sets (Kuhn-Munkres).

The solver works on a dense weight matrix and returns a matching of size
min(n, m) with maximal total weight.  Rectangular inputs are squared up by
padding the smaller side with zero-cost dummy vertices, so surplus vertices
on the longer side simply end up unmatched.
"""

from __future__ import annotations

import math
from typing import Sequence


def max_weight_assignment(weights: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Pairs (row, col) of a maximum-total-weight matching of size min(n, m).

    Runs the O(n^3) Kuhn-Munkres method on the negated (cost) matrix.
    """
    n = len(weights)
    if n == 0 or len(weights[0]) == 0:
        raise ValueError("weight matrix must be non-empty")
    m = len(weights[0])
    for row in weights:
        if len(row) != m:
            raise ValueError("weight matrix rows must have equal length")
        for w in row:
            if not math.isfinite(w):
                raise ValueError("weights must be finite")

    size = max(n, m)
    cost = [[0.0] * size for _ in range(size)]
    for i in range(n):
        for j in range(m):
            cost[i][j] = -float(weights[i][j])

    assignment = _solve_square(cost)
    pairs = [(i, j) for i, j in enumerate(assignment) if i < n and j < m]
    pairs.sort()
    return pairs


def _solve_square(cost: list[list[float]]) -> list[int]:
    """Minimum-cost perfect assignment on a square matrix.

    Classic shortest-augmenting-path formulation with row/column potentials
    (1-indexed internally); returns the column assigned to each row.
    """
    n = len(cost)
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match = [0] * (n + 1)   # match[j] = row assigned to column j
    way = [0] * (n + 1)

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1

    col_of_row = [0] * n
    for j in range(1, n + 1):
        if match[j]:
            col_of_row[match[j] - 1] = j - 1
    return col_of_row
