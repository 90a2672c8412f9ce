"""HTTP facade over the pipeline and the session state machine.

Thin adapter: every behavioral rule lives in the core modules; handlers
translate JSON bodies in and out and map failures onto status codes
(400 malformed request, 404 unknown session, 409 protocol violation,
422 rejected by the pipeline or the question tree).
"""

from __future__ import annotations

import json
import statistics
import threading
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analogy import AnalogyError
from .classify import ClassificationError
from .curves import CurveError, Quantification, operation_to_dict
from .embedding import ProviderConfig
from .extract import ExtractionConfig, ExtractionError, initial_quantification
from .metrics import MetricError, compare
from .session import (AnswerPath, InvalidAnswer, Session, SessionError,
                      SessionExhausted, SessionFinalized, start_session)
from .store import KnowledgeStore, StoreError, import_dataset

_PIPELINE_ERRORS = (ClassificationError, ExtractionError, AnalogyError, CurveError)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8472
    store_path: str | Path = "reqquant-store.jsonl"
    default_rounds: int = 5
    delta_fraction: float = 0.10
    cors_origins: tuple[str, ...] = ("*",)
    classify_provider: ProviderConfig = dataclass_field(default_factory=ProviderConfig)
    retrieve_provider: ProviderConfig = dataclass_field(default_factory=ProviderConfig)

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text("utf-8"))
        kwargs: dict[str, Any] = {}
        for key in ("host", "port", "store_path", "default_rounds", "delta_fraction"):
            if key in data:
                kwargs[key] = data[key]
        if "cors_origins" in data:
            kwargs["cors_origins"] = tuple(data["cors_origins"])
        for key in ("classify_provider", "retrieve_provider"):
            if key in data:
                kwargs[key] = ProviderConfig(**data[key])
        return cls(**kwargs)

    @property
    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(delta_fraction=self.delta_fraction)


def _error(status: int, code: str, detail: str = "") -> JSONResponse:
    body = {"error": code}
    if detail:
        body["detail"] = detail
    return JSONResponse(body, status_code=status)


async def _json_body(request: Request) -> dict | JSONResponse:
    try:
        body = await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError):
        return _error(400, "malformed-json", "request body is not valid JSON")
    if not isinstance(body, dict):
        return _error(400, "malformed-json", "request body must be a JSON object")
    return body


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="reqquant", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=list(config.cors_origins),
                       allow_methods=["*"], allow_headers=["*"])

    store = KnowledgeStore.load(config.store_path)
    sessions: dict[str, Session] = {}
    locks: dict[str, threading.Lock] = {}
    registry_lock = threading.Lock()

    def snapshot(session: Session) -> dict:
        data = session.to_dict()
        exhausted = session.finalized or session.round >= session.max_rounds
        data["next_question"] = None if exhausted else session.question_tree()
        return data

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/v1/quantify")
    async def quantify(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            return _error(400, "missing-text", "provide a non-empty 'text' field")
        try:
            draft = initial_quantification(text, provider=config.classify_provider,
                                           config=config.extraction,
                                           cache=store.embedding_cache)
        except ExtractionError as exc:
            return _error(422, "no-threshold", str(exc))
        except _PIPELINE_ERRORS as exc:
            return _error(422, "quantification-failed", str(exc))
        return {"pattern": draft.classification.pattern.value,
                "threshold": draft.threshold,
                "points": draft.quantification.to_pairs()}

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            return _error(400, "missing-text", "provide a non-empty 'text' field")
        rounds = body.get("n", config.default_rounds)
        try:
            if "points" in body:
                # start from a caller-supplied curve (resume / what-if flows)
                current = Quantification.from_pairs(body["points"])
                session = Session(text, current, max_rounds=int(rounds))
            else:
                session = start_session(
                    text, store, classify_provider=config.classify_provider,
                    retrieve_provider=config.retrieve_provider,
                    extraction=config.extraction, max_rounds=int(rounds))
        except ExtractionError as exc:
            return _error(422, "no-threshold", str(exc))
        except (*_PIPELINE_ERRORS, SessionError, TypeError, ValueError) as exc:
            return _error(422, "session-rejected", str(exc))
        with registry_lock:
            sessions[session.id] = session
            locks[session.id] = threading.Lock()
        return snapshot(session)

    def _lookup(session_id: str) -> tuple[Session, threading.Lock] | None:
        with registry_lock:
            session = sessions.get(session_id)
            if session is None:
                return None
            return session, locks[session_id]

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        found = _lookup(session_id)
        if found is None:
            return _error(404, "unknown-session", session_id)
        session, lock = found
        with lock:
            return snapshot(session)

    @app.post("/v1/sessions/{session_id}/answer")
    async def answer_session(session_id: str, request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        found = _lookup(session_id)
        if found is None:
            return _error(404, "unknown-session", session_id)
        session, lock = found
        raw_path = body.get("path")
        if not isinstance(raw_path, dict):
            return _error(422, "invalid-path", "provide the answer under 'path'")
        try:
            path = AnswerPath.from_dict(raw_path)
        except InvalidAnswer as exc:
            return _error(422, "invalid-path", str(exc))
        with lock:
            try:
                outcome = session.answer(path)
            except (SessionExhausted, SessionFinalized) as exc:
                return _error(409, "session-closed", str(exc))
            except InvalidAnswer as exc:
                return _error(422, "invalid-path", str(exc))
            return {"session": snapshot(session),
                    "operation": operation_to_dict(outcome.operation),
                    "no_op": outcome.no_op}

    @app.post("/v1/sessions/{session_id}/finalize")
    def finalize_session(session_id: str):
        found = _lookup(session_id)
        if found is None:
            return _error(404, "unknown-session", session_id)
        session, lock = found
        with lock:
            try:
                example = session.finalize(store)
            except SessionFinalized as exc:
                return _error(409, "already-finalized", str(exc))
            except StoreError as exc:
                return _error(422, "store-rejected", str(exc))
            return {"example_id": example.id}

    @app.post("/v1/evaluate")
    async def evaluate(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        try:
            if "dataset_path" in body:
                records = import_dataset(body["dataset_path"])
            else:
                from .store import DatasetRecord
                records = [DatasetRecord(str(r["id"]), str(r.get("text", "")),
                                         Quantification.from_pairs(r["ground_truth"]))
                           for r in body.get("records", [])]
        except (StoreError, CurveError, KeyError, TypeError, ValueError) as exc:
            return _error(422, "bad-dataset", str(exc))
        produced = body.get("produced")
        if not isinstance(produced, dict):
            return _error(422, "bad-produced", "provide 'produced' as {id: points}")
        if not records:
            return _error(422, "bad-dataset", "no records to evaluate")
        rows = []
        try:
            for record in records:
                if record.id not in produced:
                    return _error(422, "id-mismatch", f"missing produced points for {record.id!r}")
                candidate = Quantification.from_pairs(produced[record.id])
                report = compare(candidate, record.ground_truth)
                rows.append({"id": record.id, **report.to_dict()})
        except (CurveError, MetricError) as exc:
            return _error(422, "metric-failed", str(exc))
        aggregates = {}
        for key in ("p2p", "chebyshev", "rmse", "iad"):
            values = [row[key] for row in rows]
            deviation = statistics.stdev(values) if len(values) > 1 else 0.0
            aggregates[key] = {"mean": statistics.fmean(values), "deviation": deviation}
        return {"records": rows, "aggregates": aggregates}

    app.state.store = store
    app.state.sessions = sessions
    app.state.config = config
    return app


def run(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
