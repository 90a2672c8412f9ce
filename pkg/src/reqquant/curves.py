"""Piecewise-linear satisfaction curves and the edit algebra over them.

A curve maps a performance-metric value ``x`` (native units: Hz, req/s,
seconds, ...) to a stakeholder-satisfaction level ``y`` in [0, 1].  It is
represented by its ordered inflection points; between points the curve is
linear, outside the outermost points it is flat.

All values here are immutable; edits return new curves.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union


class CurveError(ValueError):
    """An inflection-point list or an edit on one violates its contract."""


class PatternType(Enum):
    """The three requirement shapes, serialized as P1/P2/P3 on the wire."""

    HIGHER_BETTER = "P1"  # more is better up to a threshold
    LOWER_BETTER = "P2"   # less is better down to a threshold
    TARGET_VALUE = "P3"   # one exact value is preferred

    @classmethod
    def from_label(cls, label: str) -> "PatternType":
        for member in cls:
            if member.value == label:
                return member
        raise CurveError(f"unknown pattern label {label!r}")


#: Pattern precedence used everywhere a tie must be broken deterministically.
PATTERN_ORDER = (PatternType.HIGHER_BETTER, PatternType.LOWER_BETTER,
                 PatternType.TARGET_VALUE)


@dataclass(frozen=True)
class Point:
    """One inflection point: metric value ``x``, satisfaction ``y`` in [0, 1]."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.x):
            raise CurveError(f"point x must be finite, got {self.x!r}")
        if not math.isfinite(self.y) or not 0.0 <= self.y <= 1.0:
            raise CurveError(f"point y must be in [0, 1], got {self.y!r}")

    def as_pair(self) -> list[float]:
        return [float(self.x), float(self.y)]


@dataclass(frozen=True)
class Quantification:
    """An ordered, strictly x-increasing inflection-point list (>= 2 points)."""

    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise CurveError("a quantification needs at least 2 points")
        xs = [p.x for p in self.points]
        for left, right in zip(xs, xs[1:]):
            if not left < right:
                raise CurveError(f"x values must be strictly increasing, got {xs}")

    @classmethod
    def of(cls, *pairs: Sequence[float]) -> "Quantification":
        return cls(tuple(Point(float(x), float(y)) for x, y in pairs))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "Quantification":
        return cls.of(*pairs)

    def to_pairs(self) -> list[list[float]]:
        """Canonical serialization: ordered array of [x, y] number pairs."""
        return [p.as_pair() for p in self.points]

    def xs(self) -> list[float]:
        return [p.x for p in self.points]

    def ys(self) -> list[float]:
        return [p.y for p in self.points]

    def evaluate(self, x: float) -> float:
        """Satisfaction at ``x``: flat outside the point range, linear inside."""
        pts = self.points
        if x <= pts[0].x:
            return pts[0].y
        if x >= pts[-1].x:
            return pts[-1].y
        i = bisect_right([p.x for p in pts], x)
        left, right = pts[i - 1], pts[i]
        if x == left.x:
            return left.y
        t = (x - left.x) / (right.x - left.x)
        return left.y + t * (right.y - left.y)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class AddPoint:
    """Insert ``point`` so that it ends up at position ``index``."""

    point: Point
    index: int


@dataclass(frozen=True)
class RemovePoint:
    index: int


@dataclass(frozen=True)
class ChangeValue:
    """Set one coordinate of the point at ``index`` to ``new_value``.

    ``old_value`` is the pre-edit coordinate when known; it is not needed to
    apply the edit, but lets a replay on a differently-scaled curve recover
    the direction of the original change.
    """

    index: int
    field: str  # "x" or "y"
    new_value: float
    old_value: float | None = None

    def __post_init__(self) -> None:
        if self.field not in ("x", "y"):
            raise CurveError(f"change field must be 'x' or 'y', got {self.field!r}")
        if not math.isfinite(self.new_value):
            raise CurveError("change value must be finite")


Operation = Union[AddPoint, RemovePoint, ChangeValue]


def from_pattern(pattern: PatternType, threshold: float, delta: float,
                 y_low: float = 0.0, y_high: float = 1.0) -> Quantification:
    """Instantiate the point form of a pattern around ``threshold``.

    HIGHER_BETTER ramps up from (T - delta, y_low) to (T, y_high);
    LOWER_BETTER ramps down from (T, y_high) to (T + delta, y_low);
    TARGET_VALUE peaks at (T, y_high) with both flanks at y_low.
    """
    if not (math.isfinite(threshold) and math.isfinite(delta)):
        raise CurveError("threshold and delta must be finite")
    if delta <= 0:
        raise CurveError(f"delta must be positive, got {delta!r}")
    if not y_low < y_high:
        raise CurveError(f"need y_low < y_high, got {y_low!r} >= {y_high!r}")
    if pattern is PatternType.HIGHER_BETTER:
        pts = [(threshold - delta, y_low), (threshold, y_high)]
    elif pattern is PatternType.LOWER_BETTER:
        pts = [(threshold, y_high), (threshold + delta, y_low)]
    else:
        pts = [(threshold - delta, y_low), (threshold, y_high),
               (threshold + delta, y_low)]
    return Quantification.of(*pts)


def apply_operation(q: Quantification, op: Operation) -> Quantification:
    """Apply one edit, returning a new curve; rejects anything that would
    leave fewer than 2 points, break strict x ordering, or push y out of
    [0, 1]."""
    pts = list(q.points)
    if isinstance(op, AddPoint):
        if not 0 <= op.index <= len(pts):
            raise CurveError(f"insert index {op.index} out of range for {len(pts)} points")
        pts.insert(op.index, op.point)
    elif isinstance(op, RemovePoint):
        if not 0 <= op.index < len(pts):
            raise CurveError(f"remove index {op.index} out of range for {len(pts)} points")
        if len(pts) - 1 < 2:
            raise CurveError("removal would leave fewer than 2 points")
        del pts[op.index]
    elif isinstance(op, ChangeValue):
        if not 0 <= op.index < len(pts):
            raise CurveError(f"change index {op.index} out of range for {len(pts)} points")
        old = pts[op.index]
        if op.field == "x":
            pts[op.index] = Point(op.new_value, old.y)
        else:
            pts[op.index] = Point(old.x, op.new_value)
    else:
        raise CurveError(f"unknown operation {op!r}")
    return Quantification(tuple(pts))


def apply_operations(q: Quantification, ops: Iterable[Operation]) -> Quantification:
    for op in ops:
        q = apply_operation(q, op)
    return q


def operation_cost(ops: Sequence[Operation]) -> int:
    """Edit cost: ADD and REMOVE count 1, CHANGE counts 1 per value edited
    (every ChangeValue edits exactly one coordinate)."""
    return sum(1 for _ in ops)


def clamped_value(points: Sequence[Point], index: int, field: str,
                  proposed: float) -> float:
    """Clamp a proposed coordinate so the edited curve stays valid.

    y is clamped into [0, 1].  x is kept strictly between the neighboring
    x values by falling back to the midpoint between the current value and
    the violated neighbor; a boundary point is unbounded on its open side.
    """
    if field == "y":
        return min(1.0, max(0.0, proposed))
    current = points[index].x
    if index + 1 < len(points) and proposed >= points[index + 1].x:
        return (current + points[index + 1].x) / 2.0
    if index - 1 >= 0 and proposed <= points[index - 1].x:
        return (current + points[index - 1].x) / 2.0
    return proposed


def operation_to_dict(op: Operation) -> dict:
    if isinstance(op, AddPoint):
        return {"kind": "add", "point": op.point.as_pair(), "index": op.index}
    if isinstance(op, RemovePoint):
        return {"kind": "remove", "index": op.index}
    return {"kind": "change", "index": op.index, "field": op.field,
            "new_value": op.new_value, "old_value": op.old_value}


def operation_from_dict(data: dict) -> Operation:
    kind = data.get("kind")
    if kind == "add":
        x, y = data["point"]
        return AddPoint(Point(float(x), float(y)), int(data["index"]))
    if kind == "remove":
        return RemovePoint(int(data["index"]))
    if kind == "change":
        old = data.get("old_value")
        return ChangeValue(int(data["index"]), data["field"],
                           float(data["new_value"]),
                           None if old is None else float(old))
    raise CurveError(f"unknown operation kind {kind!r}")
