import json

import pytest

from reqquant.curves import Quantification, apply_operations
from reqquant.session import (AnswerPath, InvalidAnswer, Session,
                              SessionError, SessionExhausted,
                              SessionFinalized, start_session)
from reqquant.store import KnowledgeStore, RequirementExample

REQS_TEXT = "The system requests per second (req/s) shall support at least 200."

USERS_EXAMPLE = RequirementExample(
    "users", "The number of concurrent users shall reach 100",
    Quantification.of((90, 0), (100, 1)), Quantification.of((98, 0), (100, 1)))


def _store_with_users(tmp_path):
    store = KnowledgeStore(tmp_path / "store.jsonl")
    store.add_example(USERS_EXAMPLE)
    return store


def _golden_session():
    return Session(REQS_TEXT, Quantification.of((195, 0), (200, 1)), max_rounds=5)


def _left_x(direction):
    return AnswerPath(0, "difficulty", endpoint="left", field="x", direction=direction)


# -- start_session ------------------------------------------------------------

def test_start_with_empty_store_uses_raw_draft(tmp_path):
    session = start_session(REQS_TEXT, KnowledgeStore(tmp_path / "s.jsonl"))
    assert session.current.to_pairs() == [[180.0, 0.0], [200.0, 1.0]]
    assert session.round == 0 and session.history == []


def test_start_with_analogy_applies_ten_percent_step(tmp_path):
    session = start_session(REQS_TEXT, _store_with_users(tmp_path))
    assert session.current.to_pairs() == [[198.0, 0.0], [200.0, 1.0]]
    assert session.initial.to_pairs() == [[180.0, 0.0], [200.0, 1.0]]


def test_start_without_store():
    session = start_session(REQS_TEXT)
    assert session.current.to_pairs() == [[180.0, 0.0], [200.0, 1.0]]


# -- the golden five-round walk -------------------------------------------------

def test_golden_five_round_script():
    s = _golden_session()
    s.answer(_left_x("decrease"))
    assert s.current.points[0].x == pytest.approx(175.5, abs=1e-9)
    s.answer(_left_x("increase"))
    assert s.current.points[0].x == pytest.approx(184.275, abs=1e-9)
    s.answer(AnswerPath(0, "precision", action="add"))
    assert s.current.points[1].x == pytest.approx(192.1375, abs=1e-9)
    assert s.current.points[1].y == pytest.approx(0.5, abs=1e-12)
    s.answer(AnswerPath(1, "precision", action="add"))
    assert s.current.points[2].x == pytest.approx(196.06875, abs=1e-9)
    assert s.current.points[2].y == pytest.approx(0.75, abs=1e-12)
    s.answer(AnswerPath(0, "difficulty", endpoint="right", field="y",
                        direction="increase"))
    assert s.current.points[1].y == pytest.approx(0.55, abs=1e-9)
    assert s.round == 5
    with pytest.raises(SessionExhausted):
        s.answer(_left_x("decrease"))


def test_step_memory_halves_on_each_reversal():
    s = Session("text", Quantification.of((100, 0.5), (1000, 1)), max_rounds=9)
    directions = ["decrease", "increase", "decrease", "increase"]
    expected_fractions = [0.10, 0.05, 0.025, 0.0125]
    for direction, expected in zip(directions, expected_fractions):
        before = s.current.points[0].x
        s.answer(_left_x(direction))
        moved = abs(s.current.points[0].x - before) / before
        assert moved == pytest.approx(expected, rel=1e-9)


def test_same_direction_keeps_step():
    s = Session("text", Quantification.of((100, 0.5), (10000, 1)), max_rounds=9)
    s.answer(_left_x("increase"))
    assert s.current.points[0].x == pytest.approx(110.0)
    s.answer(_left_x("increase"))
    assert s.current.points[0].x == pytest.approx(121.0)  # still 10%


def test_step_memory_tracks_points_not_indices():
    s = Session("text", Quantification.of((100, 0), (200, 1)), max_rounds=9)
    s.answer(_left_x("decrease"))  # (100,x) -> step 10%
    s.answer(AnswerPath(0, "precision", action="add"))  # insert a new point 1
    # the new point is a fresh identity: its first x touch starts at 10%
    before = s.current.points[1].x
    s.answer(AnswerPath(0, "difficulty", endpoint="right", field="x",
                        direction="decrease"))
    assert abs(s.current.points[1].x - before) / before == pytest.approx(0.10)
    # original left point keeps its own memory: reversal halves to 5%
    left_before = s.current.points[0].x
    s.answer(_left_x("increase"))
    assert abs(s.current.points[0].x - left_before) / left_before == pytest.approx(0.05)


def test_add_inserts_interval_midpoint():
    s = Session("t", Quantification.of((0, 0), (10, 1)), max_rounds=5)
    s.answer(AnswerPath(0, "precision", action="add"))
    assert s.current.to_pairs() == [[0, 0], [5, 0.5], [10, 1]]


def test_remove_endpoint_choices():
    s = Session("t", Quantification.of((0, 0), (5, 0.5), (10, 1)), max_rounds=5)
    s.answer(AnswerPath(0, "precision", action="remove", endpoint="right"))
    assert s.current.to_pairs() == [[0, 0], [10, 1]]
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(0, "precision", action="remove", endpoint="left"))


def test_change_clamps_to_no_op_at_bounds():
    s = Session("t", Quantification.of((0, 0), (10, 1)), max_rounds=5)
    outcome = s.answer(AnswerPath(0, "difficulty", endpoint="right", field="y",
                                  direction="increase"))
    assert outcome.no_op and s.current.points[1].y == 1.0
    assert s.round == 1  # the round is still consumed


def test_x_change_clamps_to_gap_midpoint():
    s = Session("t", Quantification.of((19, 0), (20, 1)), max_rounds=5)
    s.answer(_left_x("increase"))  # +10% of 19 would cross the neighbor
    assert s.current.points[0].x == pytest.approx(19.5)


def test_invalid_paths_rejected():
    s = Session("t", Quantification.of((0, 0), (10, 1)), max_rounds=5)
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(5, "difficulty", endpoint="left", field="x",
                            direction="increase"))
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(0, "difficulty"))
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(0, "precision"))
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(0, "precision", action="remove"))
    with pytest.raises(InvalidAnswer):
        s.answer(AnswerPath(0, "nonsense"))


def test_round_bound_enforced():
    s = Session("t", Quantification.of((0, 0), (10, 1)), max_rounds=1)
    s.answer(AnswerPath(0, "precision", action="add"))
    with pytest.raises(SessionExhausted):
        s.answer(AnswerPath(0, "precision", action="add"))
    with pytest.raises(SessionExhausted):
        s.current_question()


def test_max_rounds_validation():
    with pytest.raises(SessionError):
        Session("t", Quantification.of((0, 0), (1, 1)), max_rounds=0)
    with pytest.raises(SessionError):
        Session("t", Quantification.of((0, 0), (1, 1)), max_rounds=10)


# -- question tree ----------------------------------------------------------------

def test_question_walk_difficulty_branch():
    s = _golden_session()
    node = s.current_question()
    assert node.key == "interval" and node.text == "Interval to modify?"
    node = s.choose(0)
    assert node.key == "intent"
    node = s.choose("difficulty")
    assert node.key == "endpoint" and "end point" in node.text.lower()
    node = s.choose("left")
    assert node.key == "field"
    node = s.choose("x")
    assert node.key == "direction"
    path = s.choose("decrease")
    assert isinstance(path, AnswerPath)
    s.answer(path)
    assert s.current.points[0].x == pytest.approx(175.5)


def test_question_walk_precision_branch():
    s = _golden_session()
    s.choose(0)
    s.choose("precision")
    node = s.current_question()
    assert node.key == "action"
    path = s.choose("add")
    assert isinstance(path, AnswerPath) and path.action == "add"


def test_choose_rejects_unknown_values():
    s = _golden_session()
    with pytest.raises(InvalidAnswer):
        s.choose(42)


def test_question_tree_leaves_are_submittable():
    s = _golden_session()
    tree = s.question_tree()

    def leaves(node):
        if "leaf" in node:
            yield node["leaf"]
            return
        for choice in node["choices"]:
            yield from leaves(choice)

    all_leaves = list(leaves(tree))
    assert len(all_leaves) == 11  # 1 interval x (add + 2 removes + 8 changes)
    for leaf in all_leaves:
        AnswerPath.from_dict(leaf)  # validates


# -- history, replay, serialization ----------------------------------------------

def test_history_replays_to_current_state():
    s = Session("t", Quantification.of((50, 0), (100, 0.5), (150, 1)), max_rounds=9)
    tree_walk = [
        AnswerPath(0, "precision", action="add"),
        AnswerPath(1, "difficulty", endpoint="left", field="y", direction="increase"),
        AnswerPath(2, "difficulty", endpoint="right", field="x", direction="decrease"),
        AnswerPath(0, "precision", action="remove", endpoint="right"),
        AnswerPath(0, "difficulty", endpoint="left", field="x", direction="decrease"),
    ]
    for path in tree_walk:
        s.answer(path)
    replayed = apply_operations(s.start, [h.operation for h in s.history])
    assert replayed == s.current
    assert len(s.history) == s.round == 5


def test_deterministic_for_a_fixed_script():
    script = [
        AnswerPath(0, "difficulty", endpoint="left", field="x", direction="decrease"),
        AnswerPath(0, "precision", action="add"),
        AnswerPath(1, "difficulty", endpoint="right", field="y", direction="decrease"),
    ]
    finals = []
    for _ in range(2):
        s = _golden_session()
        for path in script:
            s.answer(path)
        finals.append(s.current.to_pairs())
    assert finals[0] == finals[1]


def test_serialization_round_trip():
    s = _golden_session()
    s.answer(_left_x("decrease"))
    s.answer(_left_x("increase"))
    s.answer(AnswerPath(0, "precision", action="add"))
    data = json.loads(json.dumps(s.to_dict()))
    restored = Session.from_dict(data)
    assert restored.current == s.current
    assert restored.round == s.round
    assert restored.step_memory == s.step_memory
    assert [h.operation for h in restored.history] == [h.operation for h in s.history]
    # the restored session continues identically
    s.answer(_left_x("increase"))
    restored.answer(_left_x("increase"))
    assert restored.current == s.current


# -- finalize ----------------------------------------------------------------------

def test_finalize_persists_pre_analogy_initial(tmp_path):
    store = _store_with_users(tmp_path)
    s = start_session(REQS_TEXT, store)
    example = s.finalize(store)
    assert example.initial.to_pairs() == [[180.0, 0.0], [200.0, 1.0]]
    assert example.preferred == s.current
    assert store.get(example.id) is example


def test_finalize_after_zero_rounds_stores_reasoned_state(tmp_path):
    store = _store_with_users(tmp_path)
    s = start_session(REQS_TEXT, store)
    example = s.finalize(store)
    assert example.preferred.to_pairs() == [[198.0, 0.0], [200.0, 1.0]]


def test_double_finalize_rejected(tmp_path):
    store = KnowledgeStore(tmp_path / "store.jsonl")
    s = Session("t", Quantification.of((0, 0), (1, 1)))
    s.finalize(store)
    with pytest.raises(SessionFinalized):
        s.finalize(store)
    with pytest.raises(SessionFinalized):
        s.answer(AnswerPath(0, "precision", action="add"))


def test_finalized_example_is_retrievable(tmp_path):
    store = KnowledgeStore(tmp_path / "store.jsonl")
    s = start_session(REQS_TEXT, store)
    s.answer(AnswerPath(0, "precision", action="add"))
    example = s.finalize(store)
    from reqquant.analogy import retrieve_analogy
    hit = retrieve_analogy(REQS_TEXT, Quantification.of((180, 0), (200, 1)), store)
    assert hit is not None and hit.id == example.id
