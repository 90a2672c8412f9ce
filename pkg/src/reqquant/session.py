"""Interactive preference-tuning sessions.

A session seeds its curve through the quantification pipeline (draft, then
analogy replay when the store offers one) and then walks a fixed question
tree with the stakeholder for at most N rounds.  One round runs from the
root to a leaf and applies exactly one edit:

    Interval to modify?
      -> Adjustment intent?  (precision | difficulty)
         precision -> Add or delete a point? -> [delete: Which end point?]
         difficulty -> Which end point? -> Adjust x or y? -> Increase or decrease?

Change steps start at 10% of the value's own magnitude and halve whenever
the stakeholder reverses direction on the same value; repeats in the same
direction keep the current step.  Step memory follows point identity, not
index, so insertions and removals do not alias it.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Any

from .analogy import reason
from .curves import (AddPoint, ChangeValue, CurveError, Operation, Point,
                     Quantification, RemovePoint, apply_operation, clamped_value,
                     operation_from_dict, operation_to_dict, PatternType)
from .embedding import ProviderConfig
from .extract import ExtractionConfig, initial_quantification
from .store import KnowledgeStore, RequirementExample

#: First touch of a (point, value) moves it by this fraction of its magnitude.
INITIAL_STEP_FRACTION = 0.10

PRECISION = "precision"
DIFFICULTY = "difficulty"
ADD = "add"
REMOVE = "remove"
LEFT = "left"
RIGHT = "right"
INCREASE = "increase"
DECREASE = "decrease"


class SessionError(RuntimeError):
    """Base class for session-protocol violations."""


class SessionExhausted(SessionError):
    """All interaction rounds have been used."""


class SessionFinalized(SessionError):
    """The session was already finalized."""


class InvalidAnswer(SessionError):
    """The answer path does not name a valid leaf for the current curve."""


@dataclass(frozen=True)
class AnswerPath:
    """One root-to-leaf walk of the question tree.

    ``interval_index`` i names the interval [x_i, x_{i+1}].  Precision paths
    carry ``action`` (and ``endpoint`` for removals); difficulty paths carry
    ``endpoint``, ``field``, and ``direction``.
    """

    interval_index: int
    intent: str
    action: str | None = None
    endpoint: str | None = None
    field: str | None = None
    direction: str | None = None

    def validate(self) -> None:
        if self.intent == PRECISION:
            if self.action not in (ADD, REMOVE):
                raise InvalidAnswer(f"precision path needs action add/remove, got {self.action!r}")
            if self.action == REMOVE and self.endpoint not in (LEFT, RIGHT):
                raise InvalidAnswer("removal needs an endpoint (left or right)")
            if self.action == ADD and self.endpoint is not None:
                raise InvalidAnswer("adding a point takes no endpoint")
            if self.field is not None or self.direction is not None:
                raise InvalidAnswer("precision paths carry no field or direction")
        elif self.intent == DIFFICULTY:
            if self.endpoint not in (LEFT, RIGHT):
                raise InvalidAnswer("difficulty path needs an endpoint (left or right)")
            if self.field not in ("x", "y"):
                raise InvalidAnswer("difficulty path needs a field (x or y)")
            if self.direction not in (INCREASE, DECREASE):
                raise InvalidAnswer("difficulty path needs a direction")
            if self.action is not None:
                raise InvalidAnswer("difficulty paths carry no precision action")
        else:
            raise InvalidAnswer(f"unknown intent {self.intent!r}")

    def to_dict(self) -> dict:
        data: dict[str, Any] = {"interval_index": self.interval_index, "intent": self.intent}
        for key in ("action", "endpoint", "field", "direction"):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "AnswerPath":
        try:
            path = cls(int(data["interval_index"]), str(data["intent"]),
                       data.get("action"), data.get("endpoint"),
                       data.get("field"), data.get("direction"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidAnswer(f"malformed answer path: {exc}") from exc
        path.validate()
        return path


@dataclass(frozen=True)
class Choice:
    label: str
    value: Any


@dataclass(frozen=True)
class QuestionNode:
    key: str
    text: str
    choices: tuple[Choice, ...]


@dataclass(frozen=True)
class AnswerOutcome:
    operation: Operation
    quantification: Quantification
    no_op: bool


@dataclass
class HistoryEntry:
    path: AnswerPath
    operation: Operation
    quantification: Quantification
    no_op: bool = False

    def to_dict(self) -> dict:
        return {"path": self.path.to_dict(),
                "operation": operation_to_dict(self.operation),
                "points": self.quantification.to_pairs(),
                "no_op": self.no_op}


@dataclass
class StepState:
    direction: int  # +1 / -1
    fraction: float


def _fmt(value: float) -> str:
    return f"{value:g}"


class Session:
    """Mutable elicitation state for one requirement.

    A session is driven by one actor at a time; concurrent readers may take
    ``to_dict`` snapshots, which are plain data.
    """

    def __init__(self, text: str, quantification: Quantification, *,
                 session_id: str | None = None,
                 pattern: PatternType | None = None,
                 initial: Quantification | None = None,
                 max_rounds: int = 5):
        if not 1 <= max_rounds <= 9:
            raise SessionError(f"max_rounds must be in 1..9, got {max_rounds}")
        self.id = session_id or uuid.uuid4().hex[:12]
        self.text = text
        self.pattern = pattern
        self.start = quantification       # reasoned starting state
        self.initial = initial or quantification  # pre-analogy draft, stored on finalize
        self.current = quantification
        self.max_rounds = max_rounds
        self.round = 0
        self.finalized = False
        self.history: list[HistoryEntry] = []
        self.step_memory: dict[tuple[int, str], StepState] = {}
        self.pending: list[tuple[str, Any]] = []
        self._point_ids = list(range(len(quantification.points)))
        self._next_point_id = len(quantification.points)

    # -- question tree ----------------------------------------------------

    def _guard_active(self) -> None:
        if self.finalized:
            raise SessionFinalized(f"session {self.id} is finalized")
        if self.round >= self.max_rounds:
            raise SessionExhausted(
                f"session {self.id} used all {self.max_rounds} rounds")

    def current_question(self) -> QuestionNode:
        """The next node for the answers accumulated so far this round."""
        self._guard_active()
        node = self._node_for(dict(self.pending))
        if node is None:
            raise SessionError("answer path already complete; submit it")
        return node

    def choose(self, value: Any) -> AnswerPath | QuestionNode:
        """Record one choice; returns the next node, or the completed path."""
        node = self.current_question()
        if value not in [c.value for c in node.choices]:
            raise InvalidAnswer(f"{value!r} is not a choice of {node.key!r}")
        self.pending.append((node.key, value))
        nxt = self._node_for(dict(self.pending))
        if nxt is not None:
            return nxt
        path = self._path_from(dict(self.pending))
        self.pending = []
        return path

    def _node_for(self, partial: dict[str, Any]) -> QuestionNode | None:
        points = self.current.points
        if "interval" not in partial:
            choices = tuple(Choice(f"[{_fmt(points[i].x)}, {_fmt(points[i + 1].x)}]", i)
                            for i in range(len(points) - 1))
            return QuestionNode("interval", "Interval to modify?", choices)
        if "intent" not in partial:
            return QuestionNode("intent", "Adjustment intent?",
                                (Choice("Adjust precision", PRECISION),
                                 Choice("Adjust difficulty", DIFFICULTY)))
        if partial["intent"] == PRECISION:
            if "action" not in partial:
                return QuestionNode("action", "Add or delete a point?",
                                    (Choice("Add a point", ADD),
                                     Choice("Delete a point", REMOVE)))
            if partial["action"] == REMOVE and "endpoint" not in partial:
                return QuestionNode("endpoint", "Which end point?",
                                    (Choice("Left endpoint", LEFT),
                                     Choice("Right endpoint", RIGHT)))
            return None
        if "endpoint" not in partial:
            return QuestionNode("endpoint", "Which end point?",
                                (Choice("Left endpoint", LEFT),
                                 Choice("Right endpoint", RIGHT)))
        if "field" not in partial:
            return QuestionNode("field", "Adjust x (position) or y (satisfaction)?",
                                (Choice("x", "x"), Choice("y", "y")))
        if "direction" not in partial:
            return QuestionNode("direction", "Increase or decrease?",
                                (Choice("Increase", INCREASE),
                                 Choice("Decrease", DECREASE)))
        return None

    def _path_from(self, partial: dict[str, Any]) -> AnswerPath:
        path = AnswerPath(partial["interval"], partial["intent"],
                          partial.get("action"), partial.get("endpoint"),
                          partial.get("field"), partial.get("direction"))
        path.validate()
        return path

    def question_tree(self) -> dict:
        """The whole tree for the current curve, nested, with ready-to-submit
        answer paths at the leaves (lets clients render without any curve
        logic of their own)."""
        def expand(partial: dict[str, Any]) -> dict:
            node = self._node_for(partial)
            if node is None:
                return {"leaf": self._path_from(partial).to_dict()}
            rendered = []
            for choice in node.choices:
                child = dict(partial)
                child[node.key] = choice.value
                rendered.append({"label": choice.label, "value": choice.value,
                                 **expand(child)})
            return {"key": node.key, "text": node.text, "choices": rendered}

        return expand({})

    # -- answering ---------------------------------------------------------

    def answer(self, path: AnswerPath) -> AnswerOutcome:
        """Apply the operation a completed path denotes and advance a round."""
        self._guard_active()
        path.validate()
        points = self.current.points
        if not 0 <= path.interval_index < len(points) - 1:
            raise InvalidAnswer(
                f"interval {path.interval_index} out of range for {len(points)} points")

        no_op = False
        if path.intent == PRECISION and path.action == ADD:
            i = path.interval_index
            left, right = points[i], points[i + 1]
            new_point = Point((left.x + right.x) / 2.0, (left.y + right.y) / 2.0)
            op: Operation = AddPoint(new_point, i + 1)
        elif path.intent == PRECISION:
            index = path.interval_index + (0 if path.endpoint == LEFT else 1)
            op = RemovePoint(index)
        else:
            index = path.interval_index + (0 if path.endpoint == LEFT else 1)
            direction = 1 if path.direction == INCREASE else -1
            fraction = self._step_fraction(self._point_ids[index], path.field, direction)
            value = getattr(points[index], path.field)
            proposed = value + direction * fraction * abs(value)
            clamped = clamped_value(points, index, path.field, proposed)
            no_op = clamped == value
            op = ChangeValue(index, path.field, clamped, old_value=value)

        try:
            result = apply_operation(self.current, op)
        except CurveError as exc:
            raise InvalidAnswer(str(exc)) from exc

        if isinstance(op, AddPoint):
            self._point_ids.insert(op.index, self._next_point_id)
            self._next_point_id += 1
        elif isinstance(op, RemovePoint):
            gone = self._point_ids.pop(op.index)
            self.step_memory = {k: v for k, v in self.step_memory.items()
                                if k[0] != gone}

        self.current = result
        self.round += 1
        self.pending = []
        entry = HistoryEntry(path, op, result, no_op)
        self.history.append(entry)
        return AnswerOutcome(op, result, no_op)

    def _step_fraction(self, point_id: int, field: str, direction: int) -> float:
        key = (point_id, field)
        state = self.step_memory.get(key)
        if state is None:
            fraction = INITIAL_STEP_FRACTION
        elif state.direction == direction:
            fraction = state.fraction
        else:
            fraction = state.fraction / 2.0
        self.step_memory[key] = StepState(direction, fraction)
        return fraction

    # -- lifecycle ----------------------------------------------------------

    def finalize(self, store: KnowledgeStore,
                 example_id: str | None = None) -> RequirementExample:
        """Persist {text, pre-analogy initial, preferred=current} as a future
        analogy and freeze the session."""
        if self.finalized:
            raise SessionFinalized(f"session {self.id} already finalized")
        example = RequirementExample(example_id or f"ex-{uuid.uuid4().hex[:10]}",
                                     self.text, self.initial, self.current)
        store.add_example(example)
        self.finalized = True
        return example

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "pattern": self.pattern.value if self.pattern else None,
            "points": self.current.to_pairs(),
            "round": self.round,
            "max_rounds": self.max_rounds,
            "finalized": self.finalized,
            "start": self.start.to_pairs(),
            "initial": self.initial.to_pairs(),
            "history": [entry.to_dict() for entry in self.history],
            "step_memory": [{"point": pid, "field": fld,
                             "direction": st.direction, "fraction": st.fraction}
                            for (pid, fld), st in self.step_memory.items()],
            "point_ids": list(self._point_ids),
            "next_point_id": self._next_point_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        session = cls(data["text"], Quantification.from_pairs(data["start"]),
                      session_id=data["id"],
                      pattern=(PatternType.from_label(data["pattern"])
                               if data.get("pattern") else None),
                      initial=Quantification.from_pairs(data["initial"]),
                      max_rounds=int(data["max_rounds"]))
        session.current = Quantification.from_pairs(data["points"])
        session.round = int(data["round"])
        session.finalized = bool(data["finalized"])
        session.history = [
            HistoryEntry(AnswerPath.from_dict(h["path"]),
                         operation_from_dict(h["operation"]),
                         Quantification.from_pairs(h["points"]),
                         bool(h.get("no_op", False)))
            for h in data.get("history", [])]
        session.step_memory = {
            (int(m["point"]), str(m["field"])): StepState(int(m["direction"]),
                                                          float(m["fraction"]))
            for m in data.get("step_memory", [])}
        session._point_ids = [int(i) for i in data["point_ids"]]
        session._next_point_id = int(data["next_point_id"])
        return session


def start_session(text: str, store: KnowledgeStore | None = None, *,
                  anchors=None,
                  classify_provider: ProviderConfig = ProviderConfig(),
                  retrieve_provider: ProviderConfig = ProviderConfig(),
                  extraction: ExtractionConfig = ExtractionConfig(),
                  max_rounds: int = 5,
                  use_analogy: bool = True,
                  session_id: str | None = None) -> Session:
    """Run the full pipeline and open a session on the reasoned curve."""
    cache = store.embedding_cache if store is not None else None
    draft = initial_quantification(text, anchors=anchors,
                                   provider=classify_provider,
                                   config=extraction, cache=cache)
    if use_analogy and store is not None:
        reasoned = reason(text, draft.quantification, store, retrieve_provider)
        current = reasoned.quantification
    else:
        current = draft.quantification
    return Session(text, current, session_id=session_id,
                   pattern=draft.classification.pattern,
                   initial=draft.quantification, max_rounds=max_rounds)
