"""HTTP session service for guided detection (the human-in-the-loop path).

All session state lives in a pluggable store keyed by opaque ids; the
in-memory store can be swapped for the file-backed one without changing
behavior, since a session rebuilds deterministically from (qubit count,
strategy name, seed, anchor, history). Requests to the same session are
serialized; the loaded forest model is immutable and shared.

Routes are versioned under /v1; field names are part of the wire
contract. Error mapping: 404 unknown session, 409 duplicate observable,
422 malformed observable or value, 400 qubit mismatch / unavailable
strategy.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .bayes import BayesStrategy
from .errors import (
    DuplicateMeasurementError,
    InvalidLetterError,
    QubitCountError,
    ValueRangeError,
)
from .forest.model import ForestModel, ForestStrategy
from .pauli import PauliString, observable_set, parse_pauli
from .session import SESSION_QUBIT_CAP, Session, Status, Strategy
from .treesearch import TreeStrategy

DEFAULT_TTL_SECONDS = 24 * 3600
STRATEGY_NAMES = ("forest", "tree", "bayes")


class CreateSessionRequest(BaseModel):
    n_qubits: int
    strategy: str
    seed: int | None = None
    b_star: str | None = None


class ResultRequest(BaseModel):
    observable: str
    value: float


@dataclass
class SessionHandle:
    id: str
    session: Session
    strategy: Strategy
    strategy_name: str
    seed: int
    b_star: str | None
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def touch(self) -> None:
        self.updated = time.time()

    def snapshot(self) -> dict:
        """Persistent form: enough to rebuild the handle deterministically."""
        return {
            "id": self.id,
            "n_qubits": self.session.n_qubits,
            "strategy": self.strategy_name,
            "seed": self.seed,
            "b_star": self.b_star,
            "created": self.created,
            "updated": self.updated,
            "history": [
                [obs.label, value] for obs, value in self.session.history
            ],
        }


def build_strategy(
    name: str,
    n_qubits: int,
    seed: int,
    b_star: str | None,
    model: ForestModel | None,
) -> Strategy:
    if name == "forest":
        if model is None:
            raise HTTPException(
                400, "no forest model loaded; start the service with --model"
            )
        if model.n_qubits != n_qubits:
            raise HTTPException(
                400,
                f"model is trained for {model.n_qubits} qubits, "
                f"session wants {n_qubits}",
            )
        return ForestStrategy(model)
    if name == "tree":
        anchor = None
        if b_star is not None:
            try:
                anchor = parse_pauli(b_star)
            except InvalidLetterError as exc:
                raise HTTPException(422, str(exc)) from exc
            if anchor.n_qubits != n_qubits:
                raise HTTPException(400, "b_star qubit count mismatch")
        return TreeStrategy(n_qubits, b_star=anchor)
    if name == "bayes":
        return BayesStrategy(n_qubits, seed=seed)
    raise HTTPException(422, f"unknown strategy {name!r}; use {STRATEGY_NAMES}")


def rebuild_handle(doc: dict, model: ForestModel | None) -> SessionHandle:
    session = Session(int(doc["n_qubits"]))
    strategy = build_strategy(
        doc["strategy"], session.n_qubits, int(doc["seed"]), doc.get("b_star"), model
    )
    handle = SessionHandle(
        id=doc["id"],
        session=session,
        strategy=strategy,
        strategy_name=doc["strategy"],
        seed=int(doc["seed"]),
        b_star=doc.get("b_star"),
        created=float(doc.get("created", time.time())),
        updated=float(doc.get("updated", time.time())),
    )
    for label, value in doc.get("history", []):
        session.record_result(parse_pauli(label), float(value))
    return handle


class InMemorySessionStore:
    """Session handles in a dict with lazy TTL eviction."""

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._handles: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()

    def _evict_expired(self) -> None:
        cutoff = time.time() - self.ttl
        stale = [k for k, h in self._handles.items() if h.updated < cutoff]
        for k in stale:
            del self._handles[k]

    def get(self, session_id: str) -> SessionHandle | None:
        with self._lock:
            self._evict_expired()
            return self._handles.get(session_id)

    def put(self, handle: SessionHandle) -> None:
        with self._lock:
            self._evict_expired()
            self._handles[handle.id] = handle

    def save(self, handle: SessionHandle) -> None:
        """In-memory handles mutate in place; nothing to do."""

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._handles.pop(session_id, None) is not None


class FileSessionStore:
    """JSON-file persistence; handles rebuild lazily after a restart."""

    def __init__(
        self,
        path: str,
        model: ForestModel | None = None,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
    ):
        self.path = path
        self.model = model
        self.ttl = ttl_seconds
        self._handles: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()
        self._docs: dict[str, dict] = {}
        if os.path.exists(path):
            with open(path) as fh:
                self._docs = json.load(fh)

    def _flush(self) -> None:
        tmp = f"{self.path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(self._docs, fh)
        os.replace(tmp, self.path)

    def get(self, session_id: str) -> SessionHandle | None:
        with self._lock:
            handle = self._handles.get(session_id)
            if handle is None:
                doc = self._docs.get(session_id)
                if doc is None:
                    return None
                if doc.get("updated", 0) < time.time() - self.ttl:
                    del self._docs[session_id]
                    self._flush()
                    return None
                handle = rebuild_handle(doc, self.model)
                self._handles[session_id] = handle
            return handle

    def put(self, handle: SessionHandle) -> None:
        with self._lock:
            self._handles[handle.id] = handle
            self._docs[handle.id] = handle.snapshot()
            self._flush()

    def save(self, handle: SessionHandle) -> None:
        with self._lock:
            self._docs[handle.id] = handle.snapshot()
            self._flush()

    def delete(self, session_id: str) -> bool:
        with self._lock:
            self._handles.pop(session_id, None)
            existed = self._docs.pop(session_id, None) is not None
            if existed:
                self._flush()
            return existed


def _recommendation(handle: SessionHandle) -> str | None:
    session = handle.session
    if session.status is not Status.UNDETERMINED:
        return None
    if not session.unmeasured():
        return None
    return handle.strategy.recommend(session).label


def _session_payload(handle: SessionHandle) -> dict:
    session = handle.session
    rows = []
    running = 0.0
    for obs, value in session.history:
        running += value * value
        rows.append(
            {
                "observable": obs.label,
                "value": value,
                "value_squared": value * value,
                "running_sum": running,
            }
        )
    return {
        "id": handle.id,
        "n_qubits": session.n_qubits,
        "strategy": handle.strategy_name,
        "seed": handle.seed,
        "b_star": handle.b_star,
        "history": rows,
        "criterion_sum": session.criterion_sum,
        "status": session.status.value,
        "recommendation": _recommendation(handle),
    }


def create_app(
    model: ForestModel | None = None,
    store=None,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="entdetect guided-measurement service")
    if store is None:
        store = InMemorySessionStore(ttl_seconds)
    app.state.model = model
    app.state.store = store

    def _get_handle(session_id: str) -> SessionHandle:
        handle = store.get(session_id)
        if handle is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return handle

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/v1/healthz")
    def healthz_v1():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        if not 1 <= req.n_qubits <= SESSION_QUBIT_CAP:
            raise HTTPException(
                422, f"n_qubits must lie in [1, {SESSION_QUBIT_CAP}]"
            )
        seed = req.seed if req.seed is not None else int.from_bytes(os.urandom(4), "little")
        strategy = build_strategy(
            req.strategy, req.n_qubits, seed, req.b_star, model
        )
        handle = SessionHandle(
            id=uuid.uuid4().hex,
            session=Session(req.n_qubits),
            strategy=strategy,
            strategy_name=req.strategy,
            seed=seed,
            b_star=req.b_star,
        )
        store.put(handle)
        return _session_payload(handle)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        handle = _get_handle(session_id)
        with handle.lock:
            return _session_payload(handle)

    @app.post("/v1/sessions/{session_id}/results")
    def post_result(session_id: str, req: ResultRequest):
        handle = _get_handle(session_id)
        with handle.lock:
            try:
                obs = parse_pauli(req.observable)
            except InvalidLetterError as exc:
                raise HTTPException(422, str(exc)) from exc
            if obs.n_qubits != handle.session.n_qubits:
                raise HTTPException(
                    400,
                    f"observable {obs.label} has {obs.n_qubits} qubits, "
                    f"session has {handle.session.n_qubits}",
                )
            try:
                handle.session.record_result(obs, req.value)
            except DuplicateMeasurementError as exc:
                raise HTTPException(409, str(exc)) from exc
            except ValueRangeError as exc:
                raise HTTPException(422, str(exc)) from exc
            except QubitCountError as exc:
                raise HTTPException(400, str(exc)) from exc
            handle.touch()
            store.save(handle)
            return _session_payload(handle)

    @app.delete("/v1/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not store.delete(session_id):
            raise HTTPException(404, f"unknown session {session_id}")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
