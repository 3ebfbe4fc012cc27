"""Stateful HTTP service for the interactive add-a-fact loop.

Sessions live in memory (optionally snapshotted to a state directory as
JSON).  Every mutation recompiles the task with the session's dynamic facts
and re-solves; responses carry the solution, the justification graph, the
enumerated optimal solutions and a diff against the previous solve.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query as QueryParam
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, ConfigDict, Field

from .encode import compile_task
from .generalize import GeneralizeError, generalize_task, generalized_payload
from .extract import result_bundle
from .model import Atom, TaskSpec
from .parse import ParseError, parse_atom_text, parse_rules, parse_task
from .solver import SolverConfig, solve


class CreateSessionBody(BaseModel):
    rules: str
    task: str


class FactBody(BaseModel):
    atom: str


class GeneralizeBody(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    max_iters: int | None = Field(default=None, alias="maxIters")
    pick: str | None = None


@dataclass
class Session:
    id: str
    rules_text: str
    task_text: str
    base_task: TaskSpec
    dynamic_facts: list[Atom] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)
    last_bundle: dict | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def current_task(self) -> TaskSpec:
        return self.base_task.with_facts(self.dynamic_facts)

    def record(self, action: str, cost) -> None:
        self.history.append({"action": action, "at": time.time(), "cost": cost})

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "rules": self.rules_text,
            "task": self.task_text,
            "dynamic_facts": [a.render() for a in self.dynamic_facts],
            "history": self.history,
        }


class SessionStore:
    def __init__(self, state_dir: str | None = None):
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        self.state_dir = Path(state_dir) if state_dir else None
        if self.state_dir:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            self._load()

    def _load(self) -> None:
        for path in sorted(self.state_dir.glob("*.json")):
            data = json.loads(path.read_text())
            parsed_rules = parse_rules(data["rules"])
            if not parsed_rules.ok:
                continue
            parsed_task = parse_task(data["task"], parsed_rules.value)
            if not parsed_task.ok:
                continue
            session = Session(
                id=data["id"],
                rules_text=data["rules"],
                task_text=data["task"],
                base_task=parsed_task.value,
                dynamic_facts=[parse_atom_text(a) for a in data.get("dynamic_facts", [])],
                history=data.get("history", []),
            )
            self.sessions[session.id] = session

    def persist(self, session: Session) -> None:
        if self.state_dir:
            (self.state_dir / f"{session.id}.json").write_text(json.dumps(session.snapshot(), indent=2))

    def create(self, session: Session) -> None:
        with self.lock:
            self.sessions[session.id] = session
        self.persist(session)

    def get(self, session_id: str) -> Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session


def build_app(cfg: SolverConfig | None = None, state_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    cfg = cfg or SolverConfig()
    store = SessionStore(state_dir)
    app = FastAPI(title="abductor session service")

    def solve_bundle(session: Session) -> dict:
        task = session.current_task()
        program = compile_task(task, include_justification=True)
        result = solve(program, cfg)
        if result.status in ("timeout", "solverError"):
            raise HTTPException(
                status_code=502,
                detail={"status": result.status, "output": result.raw_output[:400]},
            )
        bundle = result_bundle(result, with_graph=True)
        bundle["encoding_digest"] = program.digest()
        bundle["facts"] = {
            "base": [a.render() for a in session.base_task.user_facts],
            "dynamic": [a.render() for a in session.dynamic_facts],
        }
        return bundle

    def ensure_bundle(session: Session) -> dict:
        if session.last_bundle is None:
            session.last_bundle = solve_bundle(session)
        return session.last_bundle

    def diff_of(before: dict | None, after: dict) -> dict:
        old = set(before["abduced"]) if before else set()
        new = set(after["abduced"])
        return {"entered": sorted(new - old), "left": sorted(old - new)}

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        parsed_rules = parse_rules(body.rules)
        if not parsed_rules.ok:
            raise HTTPException(400, detail=[d.render() for d in parsed_rules.diagnostics])
        parsed_task = parse_task(body.task, parsed_rules.value)
        if not parsed_task.ok:
            raise HTTPException(400, detail=[d.render() for d in parsed_task.diagnostics])
        session = Session(
            id=secrets.token_hex(8),
            rules_text=body.rules,
            task_text=body.task,
            base_task=parsed_task.value,
        )
        store.create(session)
        return {"id": session.id}

    @app.get("/sessions/{session_id}")
    def session_summary(session_id: str) -> dict:
        session = store.get(session_id)
        task = session.base_task
        return {
            "id": session.id,
            "query": task.query.render(),
            "variant": task.variant,
            "depth": task.depth,
            "facts": {
                "base": [a.render() for a in task.user_facts],
                "dynamic": [a.render() for a in session.dynamic_facts],
            },
            "history": session.history,
        }

    @app.get("/sessions/{session_id}/encoding")
    def session_encoding(session_id: str) -> dict:
        session = store.get(session_id)
        program = compile_task(session.current_task())
        return {"text": program.text, "variant": program.variant, "maxAbLvl": program.max_ab_lvl}

    @app.post("/sessions/{session_id}/solve")
    def session_solve(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            bundle = ensure_bundle(session)
            session.record("solve", bundle.get("cost"))
            store.persist(session)
            return bundle

    def parse_ground_atom(text: str) -> Atom:
        try:
            atom = parse_atom_text(text)
        except ParseError as exc:
            raise HTTPException(400, detail=exc.diagnostic.render())
        if not atom.is_ground():
            raise HTTPException(400, detail=f"fact {text!r} is not ground")
        return atom

    @app.post("/sessions/{session_id}/facts")
    def add_fact(session_id: str, body: FactBody) -> dict:
        session = store.get(session_id)
        atom = parse_ground_atom(body.atom)
        with session.lock:
            if atom in session.base_task.user_facts or atom in session.dynamic_facts:
                raise HTTPException(400, detail=f"fact {atom.render()} is already present")
            before = ensure_bundle(session)
            session.dynamic_facts.append(atom)
            try:
                bundle = solve_bundle(session)
            except HTTPException:
                session.dynamic_facts.pop()
                raise
            session.last_bundle = bundle
            session.record(f"add_fact {atom.render()}", bundle.get("cost"))
            store.persist(session)
            return {**bundle, "diff": diff_of(before, bundle)}

    @app.delete("/sessions/{session_id}/facts")
    def remove_fact(session_id: str, body: FactBody = Body(...)) -> dict:
        session = store.get(session_id)
        atom = parse_ground_atom(body.atom)
        with session.lock:
            if atom not in session.dynamic_facts:
                raise HTTPException(400, detail=f"fact {atom.render()} is not a removable session fact")
            before = ensure_bundle(session)
            session.dynamic_facts.remove(atom)
            try:
                bundle = solve_bundle(session)
            except HTTPException:
                session.dynamic_facts.append(atom)
                raise
            session.last_bundle = bundle
            session.record(f"remove_fact {atom.render()}", bundle.get("cost"))
            store.persist(session)
            return {**bundle, "diff": diff_of(before, bundle)}

    @app.get("/sessions/{session_id}/graph")
    def session_graph(session_id: str, format: str = QueryParam(default="json")):
        session = store.get(session_id)
        with session.lock:
            bundle = ensure_bundle(session)
        if format == "json":
            return bundle["graph"]
        if format == "dot":
            from .extract import JustificationGraph, to_dot
            from .parse import parse_atom_text as _parse

            edges = frozenset(
                (
                    e["sign"],
                    e["from"] if e["from"] == "userFact" else _parse(e["from"], allow_reserved=True),
                    _parse(e["to"], allow_reserved=True),
                )
                for e in bundle["graph"]["edges"]
            )
            roots = frozenset(_parse(r, allow_reserved=True) for r in bundle["graph"]["roots"])
            return PlainTextResponse(to_dot(JustificationGraph(edges, roots)))
        raise HTTPException(400, detail=f"unknown format {format!r}")

    @app.post("/sessions/{session_id}/generalize")
    def session_generalize(session_id: str, body: GeneralizeBody | None = None) -> dict:
        session = store.get(session_id)
        body = body or GeneralizeBody()
        with session.lock:
            try:
                result = generalize_task(
                    session.current_task(),
                    cfg,
                    max_iters=body.max_iters if body.max_iters is not None else 20,
                    pick=body.pick,
                )
            except GeneralizeError as exc:
                status = {"variant": 422, "solver": 502, "cap": 400}.get(exc.kind, 400)
                raise HTTPException(status, detail=str(exc))
            session.record("generalize", None)
            store.persist(session)
            return generalized_payload(result)

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
