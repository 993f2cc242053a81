"""HTTP session service: the contract the browser UI builds on.

Plain request/response JSON; every action returns the full new state, so
clients never compute logic themselves. Item payloads carry a structured
tree with per-node path indices plus the exact text fragments of the
canonical rendering, each tagged with its owning path.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from pydantic import BaseModel

from .parser import (
    ArityMismatch,
    DuplicateGoal,
    MissingGoal,
    ParseError,
    print_annotated,
)
from .state import (
    Action,
    InvalidAction,
    Item,
    ProofState,
    Trace,
    action_from_json,
    initial_state,
)
from .syntax import (
    And,
    App,
    Bot,
    Eq,
    Exists,
    Forall,
    Imp,
    Node,
    Or,
    Pred,
    Top,
    Var,
    children,
)


def _node_kind(node: Node) -> str:
    return {
        And: "and", Or: "or", Imp: "imp", Forall: "forall", Exists: "exists",
        Pred: "pred", Eq: "eq", Top: "true", Bot: "false", Var: "var", App: "app",
    }[type(node)]


def _tree(node: Node, path: tuple[int, ...]) -> dict:
    out = {
        "kind": _node_kind(node),
        "path": list(path),
        "children": [
            _tree(kid, path + (i,)) for i, kid in enumerate(children(node))
        ],
    }
    if isinstance(node, (Pred, App)):
        out["symbol"] = node.name if isinstance(node, Pred) else node.fun
    if isinstance(node, (Forall, Exists)):
        out["binder"] = node.var
    if isinstance(node, Var):
        out["symbol"] = node.name
    return out


def item_payload(item: Item, flags: frozenset[str]) -> dict:
    out = {"id": item.id, "color": item.color, "text": item.text(flags)}
    if item.color == "green":
        out["name"] = item.name
        out["tree"] = None
        out["fragments"] = [[item.text(flags), []]]
    else:
        out["tree"] = _tree(item.formula, ())
        out["fragments"] = [
            [text, list(path)] for text, path in print_annotated(item.formula, flags)
        ]
    return out


def state_payload(state: ProofState) -> dict:
    return {
        "solved": state.solved,
        "goals": [
            {
                "id": goal.id,
                "items": [item_payload(it, state.flags) for it in goal.items],
            }
            for goal in state.goals
        ],
    }


@dataclass
class Session:
    id: str
    problem: str
    state: ProofState
    actions: list[Action] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)


class ProblemBody(BaseModel):
    problem: str


def create_app(persist_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="linkprover")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def persist(session: Session) -> None:
        if persist_dir is None:
            return
        target = FsPath(persist_dir)
        target.mkdir(parents=True, exist_ok=True)
        trace = Trace(session.problem, tuple(session.actions),
                      len(session.state.goals))
        (target / f"{session.id}.json").write_text(trace.to_json())

    @app.post("/sessions")
    def create_session(body: ProblemBody):
        try:
            state = initial_state(body.problem)
        except (ParseError, ArityMismatch, MissingGoal, DuplicateGoal) as err:
            raise HTTPException(status_code=422,
                                detail={"reason": "parse_error", "detail": str(err)})
        session = Session(uuid.uuid4().hex, body.problem, state)
        with registry_lock:
            sessions[session.id] = session
        persist(session)
        return {"session_id": session.id, "state": state_payload(state)}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return state_payload(session.state)

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, body: dict):
        session = get_session(session_id)
        with session.lock:
            try:
                action = action_from_json(body)
                rule_trace = session.state.apply(action)
            except InvalidAction as err:
                raise HTTPException(
                    status_code=422,
                    detail={"reason": err.reason, "detail": err.detail},
                )
            session.actions.append(action)
            session.updated = time.time()
            persist(session)
            out = {"state": state_payload(session.state)}
            if rule_trace is not None:
                out["rule_trace"] = [
                    {"rule": rule, "state": rendered} for rule, rendered in rule_trace
                ]
            return out

    @app.get("/sessions/{session_id}/candidates")
    def get_candidates(session_id: str, goal: int, src_item: int, dst_item: int,
                       src_path: str = ""):
        session = get_session(session_id)
        path = tuple(int(p) for p in src_path.split(",") if p != "")
        with session.lock:
            try:
                found = session.state.candidates(goal, src_item, path, dst_item)
            except InvalidAction as err:
                raise HTTPException(
                    status_code=422,
                    detail={"reason": err.reason, "detail": err.detail},
                )
            return {
                "candidates": [
                    {"path": list(p), "kind": kind} for p, kind in found
                ]
            }

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        session = get_session(session_id)
        with session.lock:
            trace = Trace(session.problem, tuple(session.actions),
                          len(session.state.goals))
            return json.loads(trace.to_json())

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        with registry_lock:
            if session_id not in sessions:
                raise HTTPException(status_code=404, detail="unknown session")
            del sessions[session_id]
        return {"deleted": True}

    @app.get("/", response_class=HTMLResponse)
    def index():
        return (
            "<html><body><h1>linkprover session service</h1>"
            "<p>POST /sessions with {\"problem\": ...} to begin.</p></body></html>"
        )

    return app
