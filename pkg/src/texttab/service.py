"""HTTP session service wrapping the matching engine.

Endpoints:
  POST /sessions
  GET  /sessions/{id}
  GET  /sessions/{id}/attributes/{name}/candidate
  POST /sessions/{id}/attributes/{name}/feedback
  GET  /sessions/{id}/table?format=csv|json
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from pathlib import Path
from typing import Dict, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .corpus import CorpusError
from .embedding import EmbeddingError, SignalWeights
from .extraction import ExtractionError
from .matching import (CONFIRM, REJECT, MatchingError, MatchingSession,
                       SessionConfig, build_table)
from .pipeline import MatchingContext, PipelineError, build_context, make_sessions


class ConfigModel(BaseModel):
    k: int = 2
    confirm_threshold: int = 10
    budget: int = 25
    q0: float = 0.05
    tau: Optional[float] = None  # None means no cutoff
    seed: int = 0
    w_label: float = 1.0
    w_mention: float = 1.0
    w_context: float = 1.0
    w_position: float = 0.0


class OpenSessionRequest(BaseModel):
    docs: str
    nuggets: str
    vectors: str
    labelmap: Optional[str] = None
    attributes: list[str] = Field(default_factory=list)
    config: ConfigModel = Field(default_factory=ConfigModel)


class FeedbackRequest(BaseModel):
    nugget_id: str
    decision: str


class ServiceSession:
    def __init__(self, session_id: str, request: OpenSessionRequest,
                 ctx: MatchingContext, sessions: Dict[str, MatchingSession]):
        self.session_id = session_id
        self.request = request
        self.ctx = ctx
        self.sessions = sessions
        self.lock = threading.Lock()

    def state(self) -> dict:
        return {
            "session_id": self.session_id,
            "attributes": [
                {
                    "name": name,
                    "phase": s.phase,
                    "done_reason": s.done_reason,
                    "interactions_used": s.interactions_used,
                    "confirmed_count": s.confirmed_count,
                    "budget": s.config.budget,
                    "confirm_threshold": s.config.confirm_threshold,
                }
                for name, s in self.sessions.items()
            ],
        }


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": error, "detail": detail})


def _build(request: OpenSessionRequest) -> tuple[MatchingContext, Dict[str, MatchingSession]]:
    cfg = request.config
    tau = math.inf if cfg.tau is None else cfg.tau
    config = SessionConfig(k=cfg.k, confirm_threshold=cfg.confirm_threshold,
                           budget=cfg.budget, q0=cfg.q0, tau=tau, seed=cfg.seed)
    weights = SignalWeights(w_label=cfg.w_label, w_mention=cfg.w_mention,
                            w_context=cfg.w_context, w_position=cfg.w_position)
    ctx = build_context(request.docs, request.nuggets, request.vectors,
                        request.attributes, config, weights,
                        labelmap_path=request.labelmap)
    return ctx, make_sessions(ctx)


def create_app(store_dir: str | Path) -> FastAPI:
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="texttab session service")
    live: Dict[str, ServiceSession] = {}
    registry_lock = threading.Lock()

    def persist(sess: ServiceSession) -> None:
        payload = {
            "request": sess.request.model_dump(),
            "sessions": {name: s.to_dict() for name, s in sess.sessions.items()},
        }
        path = store / f"{sess.session_id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        tmp.replace(path)

    def load(session_id: str) -> Optional[ServiceSession]:
        with registry_lock:
            if session_id in live:
                return live[session_id]
            path = store / f"{session_id}.json"
            if not path.exists():
                return None
            payload = json.loads(path.read_text(encoding="utf-8"))
            request = OpenSessionRequest.model_validate(payload["request"])
            ctx, _ = _build(request)
            sessions = {}
            attrs = {a.name: a for a in ctx.attributes}
            for name, state in payload["sessions"].items():
                sessions[name] = MatchingSession.from_dict(
                    state, attrs[name], ctx.embeddings)
            sess = ServiceSession(session_id, request, ctx, sessions)
            live[session_id] = sess
            return sess

    @app.post("/sessions", status_code=201)
    def open_session(request: OpenSessionRequest):
        if not request.attributes:
            return _error(400, "validation", "attribute list must not be empty")
        try:
            ctx, sessions = _build(request)
        except (PipelineError, MatchingError, CorpusError, ExtractionError,
                EmbeddingError, OSError) as exc:
            return _error(400, "validation", str(exc))
        session_id = uuid.uuid4().hex
        sess = ServiceSession(session_id, request, ctx, sessions)
        with registry_lock:
            live[session_id] = sess
        persist(sess)
        return sess.state()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        sess = load(session_id)
        if sess is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        return sess.state()

    @app.get("/sessions/{session_id}/attributes/{name}/candidate")
    def next_candidate(session_id: str, name: str):
        sess = load(session_id)
        if sess is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        if name not in sess.sessions:
            return _error(404, "not_found", f"unknown attribute {name}")
        with sess.lock:
            session = sess.sessions[name]
            candidate = session.peek()
            persist(sess)
            if candidate is None:
                return {"done": session.done_reason}
            nugget = sess.ctx.nugget(candidate.nugget_id)
            return {
                "nugget_id": candidate.nugget_id,
                "mention": nugget.mention,
                "context_sentence": nugget.context_sentence,
                "document_id": nugget.document_id,
                "label": nugget.label,
                "distance": candidate.distance,
                "parent": candidate.parent,
            }

    @app.post("/sessions/{session_id}/attributes/{name}/feedback")
    def submit_feedback(session_id: str, name: str, request: FeedbackRequest):
        sess = load(session_id)
        if sess is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        if name not in sess.sessions:
            return _error(404, "not_found", f"unknown attribute {name}")
        if request.decision not in (CONFIRM, REJECT):
            return _error(400, "validation",
                          f"decision must be confirm or reject, got {request.decision!r}")
        with sess.lock:
            session = sess.sessions[name]
            if session.phase == "done":
                return _error(409, "conflict", "session complete")
            current = session.peek()
            if current is None:
                return _error(409, "conflict", "session complete")
            if current.nugget_id != request.nugget_id:
                return _error(409, "conflict",
                              f"stale candidate {request.nugget_id}; current is "
                              f"{current.nugget_id}")
            session.submit(request.nugget_id, request.decision)
            persist(sess)
            state = sess.state()
        return next(a for a in state["attributes"] if a["name"] == name)

    @app.get("/sessions/{session_id}/table")
    def get_table(session_id: str, format: str = "json"):
        sess = load(session_id)
        if sess is None:
            return _error(404, "not_found", f"unknown session {session_id}")
        if format not in ("csv", "json"):
            return _error(400, "validation", f"unknown format {format!r}")
        with sess.lock:
            if not any(s.phase == "done" for s in sess.sessions.values()):
                return _error(409, "conflict", "no attribute has finished yet")
            table = build_table(sess.ctx.collection, sess.ctx.nuggets,
                                sess.ctx.embeddings, sess.sessions)
        if format == "csv":
            return PlainTextResponse(table.to_csv(), media_type="text/csv")
        return JSONResponse(content=json.loads(table.to_json()))

    return app
