"""Retrieval-analogical reasoning over past quantification examples.

Given a fresh draft curve, retrieve the most semantically similar past
requirement whose initial curve has the same number of points, work out the
cheapest edit sequence that turned that example's initial curve into its
preferred one, and replay those edits onto the draft.

Edit extraction aligns the two point sets as a maximum-weight bipartite
matching (edge weight = negative Euclidean distance) so the cheapest
correspondence is found rather than a naive positional one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .curves import (AddPoint, ChangeValue, CurveError, Operation, Point,
                     Quantification, RemovePoint, clamped_value)
from .embedding import EmbeddingCache, ProviderConfig, cosine_similarity, embed
from .matching import max_weight_assignment
from .store import KnowledgeStore, RequirementExample

log = logging.getLogger(__name__)

#: Replayed CHANGE edits move a value by this fraction of its own magnitude.
REPLAY_STEP_FRACTION = 0.10


class AnalogyError(ValueError):
    """The analogy machinery was fed inputs it cannot align or replay."""


@dataclass(frozen=True)
class Matching:
    """A maximum-weight pairing between two point lists.

    ``total_weight`` is the sum of negative distances over the pairs, so it
    is 0 for a perfect overlay and negative otherwise.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_source: tuple[int, ...]
    unmatched_target: tuple[int, ...]
    total_weight: float


def point_distance(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def km_match(source: Sequence[Point], target: Sequence[Point]) -> Matching:
    """Match the two point lists, maximizing total negative distance."""
    source = list(source)
    target = list(target)
    if not source or not target:
        raise AnalogyError("cannot match empty point lists")
    weights = [[-point_distance(u, v) for v in target] for u in source]
    pairs = max_weight_assignment(weights)
    matched_s = {i for i, _ in pairs}
    matched_t = {j for _, j in pairs}
    total = sum(weights[i][j] for i, j in pairs)
    return Matching(tuple(pairs),
                    tuple(i for i in range(len(source)) if i not in matched_s),
                    tuple(j for j in range(len(target)) if j not in matched_t),
                    total)


def retrieve_analogy(target_text: str, target_initial: Quantification,
                     store: KnowledgeStore,
                     provider: ProviderConfig = ProviderConfig(),
                     cache: EmbeddingCache | None = None) -> RequirementExample | None:
    """Most similar stored example whose initial curve has the same number
    of points as the draft; None when no candidate exists.  Ties keep the
    oldest example."""
    candidates = [ex for ex in store.examples
                  if len(ex.initial.points) == len(target_initial.points)]
    if not candidates:
        return None
    cache = store.embedding_cache if cache is None else cache
    target_vec = embed(target_text, provider, cache=cache)
    best = None
    best_sim = -math.inf
    for example in candidates:
        vec = (list(example.embedding) if example.embedding is not None
               else embed(example.text, provider, cache=cache))
        sim = cosine_similarity(target_vec, vec)
        if sim > best_sim:
            best, best_sim = example, sim
    return best


def _insert_placeholder(aligned: list[Point], position: int,
                        wanted: Point) -> Point:
    """Coordinates for a point added at ``position`` of ``aligned``.

    Interior gaps average the two adjacent points.  At the boundaries the
    lone neighbor has no partner to average with, so the surplus point's own
    coordinates are used, nudged inward when they would collide with the
    neighbor (a later CHANGE restores the exact value).
    """
    if 0 < position < len(aligned):
        left, right = aligned[position - 1], aligned[position]
        return Point((left.x + right.x) / 2.0, (left.y + right.y) / 2.0)
    if position == 0:
        first = aligned[0]
        if wanted.x < first.x:
            return Point(wanted.x, wanted.y)
        gap = (aligned[1].x - first.x) / 2.0 if len(aligned) > 1 else 1.0
        return Point(first.x - gap, wanted.y)
    last = aligned[-1]
    if wanted.x > last.x:
        return Point(wanted.x, wanted.y)
    gap = (last.x - aligned[-2].x) / 2.0 if len(aligned) > 1 else 1.0
    return Point(last.x + gap, wanted.y)


def _is_order_preserving(pairs: Sequence[tuple[int, int]]) -> bool:
    ordered = sorted(pairs)
    return all(a[1] < b[1] for a, b in zip(ordered, ordered[1:]))


def extract_operations(initial: Quantification,
                       preferred: Quantification) -> list[Operation]:
    """Cheapest ADD/REMOVE/CHANGE sequence from ``initial`` to ``preferred``.

    Step 1 aligns the point sets; surplus initial points become removals and
    surplus preferred points become insertions.  Step 2 re-matches the
    aligned lists and emits one CHANGE per coordinate that still differs.
    Additions and removals always precede changes; changes are ordered so
    every intermediate curve keeps strictly increasing x (x decreases by
    ascending index, x increases by descending index, then y edits).
    """
    matching = km_match(initial.points, preferred.points)
    ops: list[Operation] = []
    aligned = list(initial.points)

    if len(initial) > len(preferred):
        for offset, idx in enumerate(sorted(matching.unmatched_source)):
            ops.append(RemovePoint(idx - offset))
        doomed = set(matching.unmatched_source)
        aligned = [p for i, p in enumerate(aligned) if i not in doomed]
    elif len(initial) < len(preferred):
        target_of_source = dict(matching.pairs)
        aligned_targets = [target_of_source[i] for i in range(len(aligned))]
        for j in sorted(matching.unmatched_target):
            position = sum(1 for t in aligned_targets if t < j)
            added = _insert_placeholder(aligned, position, preferred.points[j])
            aligned.insert(position, added)
            aligned_targets.insert(position, j)
            ops.append(AddPoint(added, position))

    rematch = km_match(aligned, preferred.points)
    pairs = sorted(rematch.pairs)
    if not _is_order_preserving(pairs):
        # A crossing pairing cannot be replayed as per-point edits without
        # transiently breaking x order; positional pairing always can.
        pairs = [(i, i) for i in range(len(aligned))]

    x_down: list[ChangeValue] = []
    x_up: list[ChangeValue] = []
    y_edits: list[ChangeValue] = []
    for i, j in pairs:
        have, want = aligned[i], preferred.points[j]
        if have.x != want.x:
            edit = ChangeValue(i, "x", want.x, old_value=have.x)
            (x_down if want.x < have.x else x_up).append(edit)
        if have.y != want.y:
            y_edits.append(ChangeValue(i, "y", want.y, old_value=have.y))
    ops.extend(sorted(x_down, key=lambda e: e.index))
    ops.extend(sorted(x_up, key=lambda e: -e.index))
    ops.extend(sorted(y_edits, key=lambda e: e.index))
    return ops


def apply_analogy(target: Quantification, ops: Sequence[Operation]) -> Quantification:
    """Replay extracted edits onto a different curve.

    Removals drop the same position and insertions reuse the same gap with
    coordinates averaged from the target's own neighbors.  A change moves
    the corresponding value by 10% of its own magnitude in the direction the
    example moved, clamped so the curve stays valid; an edit that cannot
    produce a valid point is skipped and logged.
    """
    points = list(target.points)
    skipped = 0

    def misfit(message: str) -> bool:
        # A bad index is caller error unless an earlier edit was skipped by
        # clamping, in which case the remaining indices shifted through no
        # fault of the caller; degrade to skipping those too.
        if skipped:
            log.warning("skipping replayed edit after earlier skip: %s", message)
            return True
        raise AnalogyError(message)

    for op in ops:
        if isinstance(op, RemovePoint):
            if not 0 <= op.index < len(points):
                if misfit(f"remove index {op.index} does not fit the target"):
                    continue
            if len(points) - 1 < 2:
                raise AnalogyError("replayed removal would leave fewer than 2 points")
            del points[op.index]
        elif isinstance(op, AddPoint):
            if not 0 <= op.index <= len(points):
                if misfit(f"insert index {op.index} does not fit the target"):
                    continue
            if 0 < op.index < len(points):
                left, right = points[op.index - 1], points[op.index]
                candidate = Point((left.x + right.x) / 2.0, (left.y + right.y) / 2.0)
            else:
                neighbor = points[0] if op.index == 0 else points[-1]
                candidate = neighbor  # boundary gap: only one point to average
            trial = points[:op.index] + [candidate] + points[op.index:]
            try:
                Quantification(tuple(trial))
            except CurveError:
                log.warning("skipping replayed insertion at gap %d: no valid "
                            "coordinates between the target's neighbors", op.index)
                skipped += 1
                continue
            points = trial
        elif isinstance(op, ChangeValue):
            if not 0 <= op.index < len(points):
                if misfit(f"change index {op.index} does not fit the target"):
                    continue
            reference = op.old_value
            current = getattr(points[op.index], op.field)
            direction = _sign(op.new_value - (reference if reference is not None else current))
            if direction == 0:
                continue
            proposed = current + direction * REPLAY_STEP_FRACTION * abs(current)
            value = clamped_value(points, op.index, op.field, proposed)
            if op.field == "x":
                points[op.index] = Point(value, points[op.index].y)
            else:
                points[op.index] = Point(points[op.index].x, value)
        else:
            raise AnalogyError(f"unknown operation {op!r}")
    return Quantification(tuple(points))


def _sign(value: float) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


@dataclass(frozen=True)
class ReasonedDraft:
    quantification: Quantification
    example: RequirementExample | None
    operations: tuple[Operation, ...]


def reason(target_text: str, target_initial: Quantification,
           store: KnowledgeStore | None,
           provider: ProviderConfig = ProviderConfig()) -> ReasonedDraft:
    """Full reasoning pass; without a usable analogy the draft is returned
    unchanged so the cold-start path still functions."""
    if store is None or len(store) == 0:
        return ReasonedDraft(target_initial, None, ())
    example = retrieve_analogy(target_text, target_initial, store, provider)
    if example is None:
        return ReasonedDraft(target_initial, None, ())
    ops = extract_operations(example.initial, example.preferred)
    return ReasonedDraft(apply_analogy(target_initial, ops), example, tuple(ops))
