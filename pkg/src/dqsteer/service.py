"""HTTP/JSON service exposing sessions to clients.

Single-analyst, localhost-first: there is no authentication.  Mutating
requests (preview/candidates/apply) must carry the snapshot id they were
computed against and get a 409 when the session has moved on.  All errors
share one envelope: ``{"error": {"code", "message", "detail"}}``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .dimensions import QualityConfig
from .errors import (DqError, InvalidInput, PayloadTooLarge, UnknownSession)
from .modeling import EvalConfig
from .procedures import ProcedureSpec, method_schema
from .session import Session, SessionConfig, load_session, save_session
from .tabular import column_stats, ingest_csv

UPLOAD_CAP_BYTES = 50 * 1024 * 1024

BIND_ENV = "DQSTEER_BIND"
DATA_DIR_ENV = "DQSTEER_DATA_DIR"
BIND_DEFAULT = "127.0.0.1:8000"


@dataclass
class SessionStore:
    data_dir: str | None = None
    sessions: dict = field(default_factory=dict)

    def load_existing(self):
        if not self.data_dir or not os.path.isdir(self.data_dir):
            return
        for name in sorted(os.listdir(self.data_dir)):
            if name.endswith(".json"):
                session = load_session(os.path.join(self.data_dir, name))
                self.sessions[session.session_id] = session

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise UnknownSession(f"unknown session {session_id!r}")
        return self.sessions[session_id]

    def add(self, session: Session):
        self.sessions[session.session_id] = session
        self.persist(session)

    def persist(self, session: Session):
        if self.data_dir:
            os.makedirs(self.data_dir, exist_ok=True)
            save_session(session,
                         os.path.join(self.data_dir, session.session_id + ".json"))


def _error_response(status: int, code: str, message: str,
                    detail=None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message,
                                           "detail": detail}})


def _required_snapshot(session: Session, body: dict) -> None:
    snapshot_id = body.get("snapshot_id")
    if not snapshot_id:
        raise InvalidInput("request must carry the snapshot_id it was "
                           "prepared against")
    if snapshot_id != session.current_id:
        from .errors import StaleSnapshot
        raise StaleSnapshot("snapshot changed since the request was prepared",
                            detail={"expected": snapshot_id,
                                    "current": session.current_id})


def _parse_specs(raw) -> list[ProcedureSpec]:
    if not isinstance(raw, list) or not raw:
        raise InvalidInput("specs must be a non-empty list")
    return [ProcedureSpec.from_json(s) for s in raw]


def create_app(data_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="dqsteer", docs_url=None, redoc_url=None)
    # The service has no auth, so browser access is limited to pages that
    # are themselves served from this machine (the bundled UI on any port).
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"^https?://(localhost|127\.0\.0\.1)(:\d+)?$",
        allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(data_dir=data_dir)
    store.load_existing()
    app.state.store = store

    @app.exception_handler(DqError)
    async def _dq_error(request: Request, err: DqError):
        return _error_response(err.http_status, err.code, err.message,
                               err.detail)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, err: RequestValidationError):
        return _error_response(400, "validation_error",
                               "request body failed validation",
                               err.errors())

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, err: StarletteHTTPException):
        return _error_response(err.status_code, "http_error", str(err.detail))

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, err: Exception):
        return _error_response(500, "internal_error",
                               f"{type(err).__name__}: {err}")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/procedures/schema")
    def procedures_schema():
        return method_schema()

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [s.to_summary() for s in store.sessions.values()]}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        csv_text = body.get("csv")
        if not isinstance(csv_text, str) or not csv_text:
            raise InvalidInput("body must include non-empty 'csv' text")
        if len(csv_text.encode("utf-8")) > UPLOAD_CAP_BYTES:
            raise PayloadTooLarge(
                f"upload exceeds the {UPLOAD_CAP_BYTES // (1024 * 1024)} MB cap")
        ds, warnings = ingest_csv(
            csv_text,
            delimiter=body.get("delimiter", ","),
            na_tokens=body.get("na_tokens"),
            type_hints=body.get("type_hints"),
            label_column=body.get("label_column"))
        config = SessionConfig.from_json(body.get("config") or {})
        session = Session(ds, config)
        store.add(session)
        return {"session": session.to_summary(),
                "report": session.quality().to_json(),
                "warnings": [w.to_json() for w in warnings]}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get(session_id).to_summary()

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str, snapshot: str | None = None):
        session = store.get(session_id)
        return session.quality(snapshot).to_json()

    @app.get("/sessions/{session_id}/columns/{column}/stats")
    def get_column_stats(session_id: str, column: str,
                         snapshot: str | None = None):
        session = store.get(session_id)
        ds = session.snapshot(snapshot) if snapshot else session.current
        return column_stats(ds, column)

    @app.post("/sessions/{session_id}/preview")
    def post_preview(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        _required_snapshot(session, body)
        spec = ProcedureSpec.from_json(body.get("spec") or {})
        return session.preview(spec).to_json()

    @app.post("/sessions/{session_id}/candidates")
    def post_candidates(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        _required_snapshot(session, body)
        if body.get("specs") is None:
            specs = session.default_candidates()
            if not specs:
                return {"candidates": [], "snapshot_id": session.current_id}
        else:
            specs = _parse_specs(body["specs"])
        weights = body.get("weights")
        if weights is not None and not isinstance(weights, dict):
            raise InvalidInput("weights must be an object of ranking weights")
        ranked = session.rank_candidates(specs, weights=weights)
        return {"candidates": [c.to_json() for c in ranked],
                "snapshot_id": session.current_id}

    @app.post("/sessions/{session_id}/apply")
    def post_apply(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        _required_snapshot(session, body)
        spec = ProcedureSpec.from_json(body.get("spec") or {})
        result = session.apply(spec, expected_snapshot=body["snapshot_id"])
        store.persist(session)
        return {"result": result.to_json(), "session": session.to_summary()}

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        session = store.get(session_id)
        notice = session.undo()
        store.persist(session)
        return {"undo": notice, "session": session.to_summary()}

    @app.post("/sessions/{session_id}/redo")
    def post_redo(session_id: str):
        session = store.get(session_id)
        notice = session.redo()
        store.persist(session)
        return {"redo": notice, "session": session.to_summary()}

    @app.post("/sessions/{session_id}/evaluate")
    def post_evaluate(session_id: str, body: dict | None = Body(None)):
        session = store.get(session_id)
        config = None
        if body and body.get("config"):
            config = EvalConfig.from_json(body["config"])
        snapshot_id = body.get("snapshot_id") if body else None
        return session.evaluate(config, snapshot_id=snapshot_id).to_json()

    @app.get("/sessions/{session_id}/drift")
    def get_drift(session_id: str,
                  frm: str | None = Query(None, alias="from"),
                  to: str | None = None):
        session = store.get(session_id)
        from_id = frm or session.root_id
        to_id = to or session.current_id
        entries = session.drift(from_id, to_id)
        return {"from": from_id, "to": to_id,
                "entries": [e.to_json() for e in entries]}

    @app.get("/sessions/{session_id}/export.csv")
    def export_csv(session_id: str, snapshot: str | None = None):
        session = store.get(session_id)
        return PlainTextResponse(session.export_csv(snapshot),
                                 media_type="text/csv")

    @app.get("/sessions/{session_id}/script")
    def export_script(session_id: str):
        return store.get(session_id).export_script()

    return app


def serve(bind: str | None = None, data_dir: str | None = None):
    """Run the service until interrupted."""
    import uvicorn
    bind = bind or os.environ.get(BIND_ENV, BIND_DEFAULT)
    data_dir = data_dir or os.environ.get(DATA_DIR_ENV)
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise InvalidInput(f"bind address {bind!r} is not host:port")
    app = create_app(data_dir=data_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
