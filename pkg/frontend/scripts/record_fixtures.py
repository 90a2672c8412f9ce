#!/usr/bin/env python3
"""Record service fixtures for the frontend contract tests.

Drives the real HTTP service through the golden five-round session and saves
every response verbatim under tests/fixtures/golden_session/.  Rerun after
any service-side change that affects snapshots:

    python3 scripts/record_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from reqquant.service import ServiceConfig, create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "golden_session"

REQS_TEXT = "The system requests per second (req/s) shall support at least 200."

ANSWERS = [
    {"interval_index": 0, "intent": "difficulty", "endpoint": "left",
     "field": "x", "direction": "decrease"},
    {"interval_index": 0, "intent": "difficulty", "endpoint": "left",
     "field": "x", "direction": "increase"},
    {"interval_index": 0, "intent": "precision", "action": "add"},
    {"interval_index": 1, "intent": "precision", "action": "add"},
    {"interval_index": 0, "intent": "difficulty", "endpoint": "right",
     "field": "y", "direction": "increase"},
]


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(ServiceConfig(store_path=Path(tmp) / "store.jsonl"))
        with TestClient(app) as client:
            created = client.post("/v1/sessions",
                                  json={"text": REQS_TEXT,
                                        "points": [[195, 0], [200, 1]], "n": 5})
            created.raise_for_status()
            _dump("step0.json", created.json())
            sid = created.json()["id"]
            for i, path in enumerate(ANSWERS, start=1):
                answered = client.post(f"/v1/sessions/{sid}/answer",
                                       json={"path": path})
                answered.raise_for_status()
                _dump(f"step{i}.json", answered.json())
            finalized = client.post(f"/v1/sessions/{sid}/finalize")
            finalized.raise_for_status()
            _dump("finalize.json", finalized.json())
    print(f"fixtures written to {FIXTURE_DIR}")
    return 0


def _dump(name: str, payload: dict) -> None:
    (FIXTURE_DIR / name).write_text(json.dumps(payload, indent=2) + "\n",
                                    encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
