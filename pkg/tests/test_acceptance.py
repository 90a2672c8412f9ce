"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line, with tolerances pinned in the assertions."""

import contextlib
import json
import math
import random
import time

import pytest
from click.testing import CliRunner

from reqquant.analogy import apply_analogy, extract_operations, km_match, retrieve_analogy
from reqquant.classify import classify
from reqquant.cli import main as cli_main
from reqquant.curves import (AddPoint, ChangeValue, Quantification,
                             apply_operations, operation_cost)
from reqquant.extract import initial_quantification
from reqquant.metrics import (chebyshev, cognitive_overhead_ratio, compare,
                              iad, normalize_domain, rmse)
from reqquant.session import AnswerPath, Session, SessionExhausted
from reqquant.store import KnowledgeStore, RequirementExample

from util import (brute_force_assignment, exact_squared_difference_integral,
                  random_points, random_quantification)

ECG = ("The software must receive and process ECG signal data at a frequency "
       "of no less than 1000Hz.")
REQS_TEXT = "The system requests per second (req/s) shall support at least 200."
SEARCH = ("In the Online Bookstore System, the search results for book titles "
          "shall be returned to the user within 5 seconds to ensure a smooth "
          "browsing experience.")


@contextlib.contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def test_a1_initial_quantification_goldens():
    with criterion("initial quantification goldens (zero tolerance)"):
        assert initial_quantification(ECG).quantification.to_pairs() == \
            [[900.0, 0.0], [1000.0, 1.0]]
        assert initial_quantification(REQS_TEXT).quantification.to_pairs() == \
            [[180.0, 0.0], [200.0, 1.0]]
        assert initial_quantification(SEARCH).quantification.to_pairs() == \
            [[5.0, 1.0], [5.5, 0.0]]


def test_a2_classification_and_threshold_goldens():
    with criterion("pattern classification and threshold goldens (zero tolerance)"):
        assert classify("The recommendation accuracy should not be less than 85%"
                        ).pattern.value == "P1"
        assert classify("Response time is less than 5s").pattern.value == "P2"
        assert classify("Refresh rate shall be equivalent to 5s/time"
                        ).pattern.value == "P3"
        text = "The response time must not exceed 200ms."
        from reqquant.extract import extract_threshold
        assert extract_threshold(text, classify(text)) == 200.0


def test_a3_edit_extraction_and_replay_goldens():
    with criterion("edit extraction cost 3 with structural edits first (zero tolerance)"):
        ops = extract_operations(Quantification.of((9, 0), (10, 1)),
                                 Quantification.of((8.5, 0), (9.5, 0.5), (10.5, 1)))
        assert operation_cost(ops) == 3
        assert isinstance(ops[0], AddPoint)
        assert all(isinstance(op, ChangeValue) for op in ops[1:])
    with criterion("analogy replay of remove+decrease onto the 3-point curve (zero tolerance)"):
        source_ops = extract_operations(Quantification.of((10, 1), (12, 0.5), (16, 0)),
                                        Quantification.of((10, 1), (14.4, 0)))
        replayed = apply_analogy(Quantification.of((25, 1), (30, 0.5), (40, 0)),
                                 source_ops)
        assert replayed.to_pairs() == [[25.0, 1.0], [36.0, 0.0]]


def test_a4_matching_oracle_and_runtime():
    with criterion("matching equals brute force on 200 random instances (1e-9)"):
        rng = random.Random(20240817)
        for _ in range(200):
            source = random_points(rng, rng.randint(1, 6))
            target = random_points(rng, rng.randint(1, 6))
            weights = [[-math.hypot(u.x - v.x, u.y - v.y) for v in target]
                       for u in source]
            got = km_match(source, target).total_weight
            want = brute_force_assignment(weights)
            assert abs(got - want) <= 1e-9

    with criterion("retrieve+extract+apply over a 40-example store under 0.2 s"):
        rng = random.Random(7)
        store = KnowledgeStore()
        for i in range(40):
            lo = rng.uniform(0, 500)
            initial = Quantification.of((lo, 0), (lo + rng.uniform(1, 50), 1))
            preferred = random_quantification(rng, 4)
            store.add_example(RequirementExample(
                f"ex{i}", f"requirement number {i} shall support at least {100 + i} users",
                initial, preferred))
        target_initial = Quantification.of((180, 0), (200, 1))
        start = time.perf_counter()
        example = retrieve_analogy(REQS_TEXT, target_initial, store)
        ops = extract_operations(example.initial, example.preferred)
        apply_analogy(target_initial, ops)
        elapsed = time.perf_counter() - start
        assert elapsed < 0.2, f"took {elapsed:.3f}s"


GOLDEN_SCRIPT = [
    AnswerPath(0, "difficulty", endpoint="left", field="x", direction="decrease"),
    AnswerPath(0, "difficulty", endpoint="left", field="x", direction="increase"),
    AnswerPath(0, "precision", action="add"),
    AnswerPath(1, "precision", action="add"),
    AnswerPath(0, "difficulty", endpoint="right", field="y", direction="increase"),
]


def test_a5_five_round_session_golden():
    with criterion("five-round scripted session reproduces the golden values (1e-9)"):
        session = Session(REQS_TEXT, Quantification.of((195, 0), (200, 1)),
                          max_rounds=5)
        checks = [
            lambda s: abs(s.current.points[0].x - 175.5) <= 1e-9,
            lambda s: abs(s.current.points[0].x - 184.275) <= 1e-9,
            lambda s: (abs(s.current.points[1].x - 192.1375) <= 1e-9
                       and abs(s.current.points[1].y - 0.5) <= 1e-9),
            lambda s: (abs(s.current.points[2].x - 196.06875) <= 1e-9
                       and abs(s.current.points[2].y - 0.75) <= 1e-9),
            lambda s: abs(s.current.points[1].y - 0.55) <= 1e-9,
        ]
        rounded = [175.5, 184.275, (192.1375, 0.5), (196.06875, 0.75), 0.55]
        for path, check in zip(GOLDEN_SCRIPT, checks):
            session.answer(path)
            assert check(session), f"round {session.round} diverged: " \
                                   f"{session.current.to_pairs()} vs {rounded}"
        with pytest.raises(SessionExhausted):
            session.answer(GOLDEN_SCRIPT[0])


def test_a6_metric_criteria():
    ramp = Quantification.of((0, 0), (1, 1))
    flat = Quantification.of((0, 0), (1, 0))
    with criterion("identical pairs score zero on all four metrics"):
        report = compare(ramp, ramp)
        assert report.to_dict() == {"p2p": 0.0, "chebyshev": 0.0,
                                    "rmse": 0.0, "iad": 0.0}
    with criterion("rmse of ramp-vs-flat within 1e-3 of 1/sqrt(3) at n=1000"):
        assert abs(rmse(ramp, flat, 1000) - 1 / math.sqrt(3)) <= 1e-3
    with criterion("iad bounded by chebyshev on 500 random pairs"):
        rng = random.Random(31337)
        for _ in range(500):
            q1 = random_quantification(rng, 6)
            q2 = random_quantification(rng, 6)
            assert iad(q1, q2) <= chebyshev(q1, q2) + 1e-12
    with criterion("rmse within 1e-3 of the exact squared-difference integral"):
        rng = random.Random(271828)
        for _ in range(200):
            q1 = random_quantification(rng, 5)
            q2 = random_quantification(rng, 5)
            n1, n2 = normalize_domain(q1, q2)
            exact = math.sqrt(exact_squared_difference_integral(n1, n2))
            assert abs(rmse(q1, q2, 1000) - exact) <= 1e-3
    with criterion("cognitive overhead ratio of [3] vs [5] is 0.6"):
        assert cognitive_overhead_ratio([3], [5]) == pytest.approx(0.6, abs=1e-12)


def test_a7_round_trips(tmp_path):
    with criterion("store save/load identity"):
        path = tmp_path / "store.jsonl"
        store = KnowledgeStore(path)
        rng = random.Random(5)
        for i in range(10):
            store.add_example(RequirementExample(
                f"e{i}", f"text {i}", random_quantification(rng, 4),
                random_quantification(rng, 4)))
        store.embedding_cache[("builtin-lexical:256", "text 0")] = [1.0, 0.0]
        store.save()
        reloaded = KnowledgeStore.load(path)
        assert [e.to_record() for e in reloaded] == [e.to_record() for e in store]
        assert reloaded.embedding_cache == store.embedding_cache

    with criterion("session history replay reproduces the current state"):
        session = Session(REQS_TEXT, Quantification.of((195, 0), (200, 1)),
                          max_rounds=5)
        for path in GOLDEN_SCRIPT:
            session.answer(path)
        replayed = apply_operations(session.start,
                                    [h.operation for h in session.history])
        assert replayed == session.current

    with criterion("extracted edits replay the source initial into the source preferred"):
        rng = random.Random(61)
        for _ in range(200):
            initial = random_quantification(rng, 5)
            preferred = random_quantification(rng, 5)
            ops = extract_operations(initial, preferred)
            assert apply_operations(initial, ops) == preferred


def test_a8_sweep_harness_shapes(tmp_path):
    runner = CliRunner()
    dataset = tmp_path / "ds.jsonl"
    rows = [
        {"id": "ecg", "text": ECG, "ground_truth": [[900, 0], [1000, 1]]},
        {"id": "reqs", "text": REQS_TEXT,
         "ground_truth": [[180, 0], [195, 0.6], [198, 0.8], [200, 1]]},
    ]
    dataset.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    script = tmp_path / "answers.jsonl"
    script.write_text("".join(json.dumps(p.to_dict()) + "\n"
                              for p in GOLDEN_SCRIPT), encoding="utf-8")

    with criterion("N sweep over 1..9 with scripted answers emits the aggregate table"):
        result = runner.invoke(cli_main, [
            "sweep", "--param", "N", "--values", "1,2,3,4,5,6,7,8,9",
            "--dataset", str(dataset), "--script", str(script), "--json"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output.splitlines()[-1])
        assert [row["value"] for row in payload["rows"]] == list(range(1, 10))
        for row in payload["rows"]:
            for metric in ("p2p", "chebyshev", "rmse", "iad"):
                assert f"{metric}_mean" in row and f"{metric}_deviation" in row
                assert row[f"{metric}_mean"] >= 0.0

    with criterion("delta sweep over 5%..15% emits the aggregate table"):
        values = ",".join(f"{v}%" for v in range(5, 16))
        result = runner.invoke(cli_main, [
            "sweep", "--param", "delta", "--values", values,
            "--dataset", str(dataset), "--script", str(script), "--json"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output.splitlines()[-1])
        assert len(payload["rows"]) == 11
        assert payload["rows"][0]["value"] == pytest.approx(0.05)
        assert payload["rows"][-1]["value"] == pytest.approx(0.15)
        for row in payload["rows"]:
            for metric in ("p2p", "chebyshev", "rmse", "iad"):
                assert f"{metric}_mean" in row and f"{metric}_deviation" in row
