"""HTTP session service: scenario catalog, live sessions, branching, traces.

Endpoints live under /api/v1 and speak JSON. Sessions are held in memory
with a sliding TTL; each session steps under its own lock, so concurrent
requests to one session serialize while distinct sessions run in parallel.
With a persistence file configured, live sessions are written there on
shutdown and replayed on the next start.
"""

from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from pydantic import Field as PydanticField

from . import __version__
from .addressing import parse_key, split_key_list
from .engine import Session, StepReport, branch, new_session
from .errors import DomainError, EngineError, IllegalActionError, TraceError
from .model import ActionInstance, ActionType, Actor, ProgressGraph
from .scenario import ScenarioDef
from .scenario_format import load_scenario
from .spanish_steps import bundled_dir
from .trace_io import series_json

DEFAULT_TTL_SECONDS = 3600.0


class CreateSessionRequest(BaseModel):
    scenario: str
    variant: str | None = None


class ActionRequest(BaseModel):
    actor: str
    action_type: str
    args: dict[str, float] = PydanticField(default_factory=dict)


class BranchRequest(BaseModel):
    at_step: int


class ScenarioRegistry:
    """Compiled scenario variants; read-only once constructed."""

    def __init__(self, dirs: Sequence[Path | str]):
        self._variants: dict[str, dict[str, ScenarioDef]] = {}
        self._defaults: dict[str, str] = {}
        self._order: list[str] = []
        for d in dirs:
            for path in sorted(Path(d).glob("*.cssm")):
                default = load_scenario(path)
                if default.id in self._variants:
                    continue  # first directory on the path wins
                cache = {default.variant: default}
                for variant in default.variants:
                    if variant not in cache:
                        cache[variant] = load_scenario(path, variant=variant)
                self._variants[default.id] = cache
                self._defaults[default.id] = default.variant
                self._order.append(default.id)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._order)

    def get(self, scenario_id: str, variant: str | None = None) -> ScenarioDef:
        """Raises KeyError for an unknown scenario, DomainError for a variant."""
        if scenario_id not in self._variants:
            raise KeyError(scenario_id)
        cache = self._variants[scenario_id]
        variant = variant or self._defaults[scenario_id]
        if variant not in cache:
            raise DomainError(f"unknown variant {variant!r}; "
                              f"declared: {', '.join(cache)}")
        return cache[variant]


@dataclass
class SessionEntry:
    session: Session
    scenario_id: str
    created: float
    last_active: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session table with sliding-TTL eviction."""

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS,
                 clock: Callable[[], float] = time.time):
        self.ttl_seconds = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, SessionEntry] = {}

    def put(self, session: Session, scenario_id: str) -> SessionEntry:
        now = self._clock()
        entry = SessionEntry(session, scenario_id, created=now, last_active=now)
        with self._lock:
            self._purge(now)
            self._entries[session.id] = entry
        return entry

    def get(self, session_id: str) -> SessionEntry:
        """Raises KeyError whether the session expired or never existed."""
        now = self._clock()
        with self._lock:
            self._purge(now)
            entry = self._entries.get(session_id)
            if entry is None:
                raise KeyError(session_id)
            entry.last_active = now
            return entry

    def items(self) -> list[tuple[str, SessionEntry]]:
        with self._lock:
            self._purge(self._clock())
            return list(self._entries.items())

    def _purge(self, now: float) -> None:
        dead = [sid for sid, entry in self._entries.items()
                if now - entry.last_active > self.ttl_seconds]
        for sid in dead:
            del self._entries[sid]


def _actor_json(actor: Actor) -> dict:
    return {"id": actor.id, "kind": actor.kind, "size": actor.group_size,
            "cultures": list(actor.cultures), "display": actor.display}


def _action_json(scenario: ScenarioDef, atype: ActionType) -> dict:
    params = []
    for p in atype.params:
        ladder = scenario.ladders.get(p.ladder) if p.ladder else None
        params.append({
            "name": p.name, "domain": p.domain, "ladder": p.ladder,
            "keywords": [{"value": v, "keyword": w}
                         for v, w in (ladder.entries if ladder else ())],
        })
    return {"id": atype.id, "display": atype.display_id,
            "performer": atype.performer, "terminal": atype.terminal,
            "description": atype.description, "params": params}


def _graph_json(graph: ProgressGraph) -> dict:
    return {
        "start": graph.start,
        "states": [{"id": s, "terminal": s in graph.terminals}
                   for s in graph.states],
        "edges": [{"from": e.state, "actor": e.actor, "action": e.action,
                   "to": e.successor, "verified": e.verified}
                  for e in graph.edges],
    }


def _scenario_json(registry: ScenarioRegistry, scenario_id: str) -> dict:
    scenario = registry.get(scenario_id)
    return {
        "id": scenario.id,
        "default_variant": scenario.variant,
        "variants": list(scenario.variants),
        "cultures": list(scenario.cultures),
        "actors": [_actor_json(a) for a in scenario.actors.values()],
        "actions": [_action_json(scenario, t)
                    for t in scenario.action_types.values()],
        "questions": [{"id": q.id, "text": q.text}
                      for q in scenario.questions.values()],
        "graph": _graph_json(scenario.graph),
    }


def _mass_json(mass) -> dict:
    return {"m_true": mass.m_true, "m_false": mass.m_false,
            "support": mass.support, "plausibility": mass.plausibility}


def _state_json(entry: SessionEntry, ttl_seconds: float) -> dict:
    session = entry.session
    snapshot = session.current
    return {
        "session": {"id": session.id, "scenario": entry.scenario_id,
                    "variant": session.scenario.variant,
                    "created": entry.created, "ttl_seconds": ttl_seconds},
        "progress": snapshot.progress,
        "terminated": session.terminated,
        "step_count": len(session.trace),
        "keys": [str(k) for k in session.scenario.all_keys()],
        "values": {str(k): snapshot.value(k)
                   for k in session.scenario.all_keys()},
        "available": {actor: list(actions)
                      for actor, actions in session.available_map().items()},
    }


def _step_json(session: Session, report: StepReport) -> dict:
    return {
        "step": report.index + 1,
        "action": report.action.type_id,
        "actor": report.action.actor,
        "args": dict(report.action.args),
        "progress_before": report.progress_before,
        "progress_after": report.progress_after,
        "terminated": report.terminated,
        "cssm_deltas": {str(k): {"old": old, "new": new}
                        for k, (old, new) in report.cssm_deltas.items()},
        "cb_deltas": {str(k): {"old": _mass_json(old), "new": _mass_json(new)}
                      for k, (old, new) in report.cb_deltas.items()},
        "values": {str(k): session.value(k)
                   for k in session.scenario.all_keys()},
        "available": {actor: list(actions)
                      for actor, actions in session.available_map().items()},
    }


def _save_sessions(store: SessionStore, path: Path) -> None:
    payload = {"sessions": [
        {"id": entry.session.id, "scenario": entry.scenario_id,
         "variant": entry.session.scenario.variant, "created": entry.created,
         "actions": [{"type": a.type_id, "actor": a.actor, "args": a.args}
                     for a in entry.session.trace.actions()]}
        for _, entry in sorted(store.items())]}
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _load_sessions(store: SessionStore, registry: ScenarioRegistry,
                   path: Path) -> None:
    payload = json.loads(path.read_text(encoding="utf-8"))
    for row in payload.get("sessions", ()):
        try:
            scenario = registry.get(row["scenario"], row.get("variant"))
            session = new_session(scenario, session_id=row["id"])
            for a in row["actions"]:
                session.step(ActionInstance(a["type"], a["actor"],
                                            dict(a["args"])))
        except (EngineError, KeyError):
            continue  # the scenario changed since the snapshot; drop it
        entry = store.put(session, row["scenario"])
        entry.created = row.get("created", entry.created)


def create_app(scenario_dirs: Sequence[Path | str] | None = None, *,
               ttl_seconds: float = DEFAULT_TTL_SECONDS,
               persist: Path | str | None = None,
               frontend_dir: Path | str | None = None,
               clock: Callable[[], float] = time.time) -> FastAPI:
    """Build the service around a scenario directory list.

    scenario_dirs defaults to the bundled scenario directory. frontend_dir
    (default ./frontend/dist when present) is served statically at /.
    """
    registry = ScenarioRegistry(scenario_dirs or (bundled_dir(),))
    store = SessionStore(ttl_seconds, clock=clock)
    persist_path = Path(persist) if persist else None
    if persist_path and persist_path.exists():
        _load_sessions(store, registry, persist_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if persist_path:
            _save_sessions(store, persist_path)

    app = FastAPI(title="norm-engine", version=__version__, lifespan=lifespan)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.store = store
    app.state.registry = registry

    def live_entry(session_id: str) -> SessionEntry:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(
                410, f"no live session {session_id!r} (missing or expired)")

    @app.get("/api/v1/scenarios")
    def list_scenarios() -> list[dict]:
        return [_scenario_json(registry, sid) for sid in registry.ids]

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        try:
            scenario = registry.get(req.scenario, req.variant)
        except KeyError:
            raise HTTPException(404, f"unknown scenario {req.scenario!r}")
        except DomainError as exc:
            raise HTTPException(422, str(exc))
        entry = store.put(new_session(scenario), req.scenario)
        return _state_json(entry, ttl_seconds)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        entry = live_entry(session_id)
        with entry.lock:
            return _state_json(entry, ttl_seconds)

    @app.post("/api/v1/sessions/{session_id}/actions")
    def post_action(session_id: str, req: ActionRequest) -> dict:
        entry = live_entry(session_id)
        action = ActionInstance(type_id=req.action_type, actor=req.actor,
                                args=dict(req.args))
        with entry.lock:
            try:
                report = entry.session.step(action)
            except IllegalActionError as exc:
                raise HTTPException(409, {
                    "message": str(exc),
                    "legal": list(exc.legal),
                    "terminated": entry.session.terminated,
                })
            return _step_json(entry.session, report)

    @app.post("/api/v1/sessions/{session_id}/branch", status_code=201)
    def post_branch(session_id: str, req: BranchRequest) -> dict:
        entry = live_entry(session_id)
        with entry.lock:
            try:
                forked = branch(entry.session.trace, req.at_step)
            except TraceError as exc:
                raise HTTPException(422, str(exc))
        new_entry = store.put(forked, entry.scenario_id)
        return _state_json(new_entry, ttl_seconds)

    @app.get("/api/v1/sessions/{session_id}/trace")
    def get_trace(session_id: str, keys: str = "") -> dict:
        entry = live_entry(session_id)
        with entry.lock:
            try:
                labeled = [(text, parse_key(text, entry.session.scenario))
                           for text in split_key_list(keys)] if keys else []
            except EngineError as exc:
                raise HTTPException(422, str(exc))
            return series_json(entry.session.trace, labeled)

    dist = Path(frontend_dir) if frontend_dir else Path("frontend/dist")
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=str(dist), html=True), name="ui")
    return app
