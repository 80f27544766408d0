"""FastAPI session service.

WebSocket protocol on /ws (persistent, bidirectional, one session per
connection by default) plus one-shot HTTP endpoints under /api that mirror
load / run_trace / analyze for scripting. The server declares its protocol
version in the first frame; clients that need a different major version
should disconnect.

A session's state is owned by its connection and mutated only between
awaits, so engine mutations never interleave. Named sessions registered at
load time can be observed (snapshot/analyze) read-only from other
connections under an asyncio lock.
"""

from __future__ import annotations

import asyncio
import json
from typing import Any

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from pydantic import ValidationError

from .. import __version__
from ..analysis import AnalysisError, analyze
from ..engine import InvalidScenario, SimState, init_session, run_trace
from ..format import FormatError, parse_scenario, scenario_from_obj, validate_scenario
from ..model import PLAYER_OWNER, Scenario
from .models import (
    AnalyzeBody,
    AnalyzeRequest,
    Envelope,
    EventBody,
    LoadBody,
    PROTOCOL_VERSION,
    RunRequest,
    RunTraceBody,
    ScenarioRequest,
    SnapshotBody,
    StepBody,
    ValidateResponse,
)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 7341


class SessionRegistry:
    """Named shared sessions for multi-window inspection."""

    def __init__(self) -> None:
        self._sessions: dict[str, SimState] = {}
        self._locks: dict[str, asyncio.Lock] = {}

    def register(self, name: str, state: SimState) -> None:
        self._sessions[name] = state
        self._locks.setdefault(name, asyncio.Lock())

    def get(self, name: str) -> tuple[SimState, asyncio.Lock] | None:
        state = self._sessions.get(name)
        if state is None:
            return None
        return state, self._locks[name]


def _parse_payload(scenario: dict[str, Any] | str) -> Scenario:
    if isinstance(scenario, str):
        return parse_scenario(scenario)
    return scenario_from_obj(scenario)


def snapshot_doc(st: SimState, since_seq: int = -1) -> dict[str, Any]:
    """Immutable view of a session: world, player bindings, and the log
    records that arrived after ``since_seq``."""
    return {
        "tick": st.tick,
        "scenario": st.content_hash,
        "player": {
            "position": st.player_pos.as_list(),
            "running": st.active_actions(PLAYER_OWNER),
        },
        "agents": [
            {
                "id": agent.id,
                "position": agent.position.as_list(),
                "frozen": agent.frozen,
                "active": agent.active,
                "attributes": dict(agent.attributes),
                "running": st.active_actions(agent.id),
            }
            for agent in sorted(st.agents.values(), key=lambda a: a.id)
        ],
        "bindings": [
            {"action": d.id, "method": d.binding.method,
             "ready_at": st.player_ready.get(d.id, 0)}
            for d in sorted(st.scenario.player_actions(), key=lambda d: d.id)
        ],
        "events": [r.to_obj() for r in st.log.records if r.seq > since_seq],
        "last_seq": st.log.records[-1].seq if st.log.records else -1,
    }


def create_app(studio_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="causaldeck session service", version=__version__)
    registry = SessionRegistry()

    # -- one-shot HTTP mirrors ------------------------------------------------

    @app.get("/api/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__, "protocol": PROTOCOL_VERSION}

    @app.post("/api/validate", response_model=ValidateResponse)
    def http_validate(req: ScenarioRequest) -> ValidateResponse:
        try:
            scenario = _parse_payload(req.scenario)
        except FormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        diagnostics = validate_scenario(scenario)
        errors = sum(1 for d in diagnostics if d.severity == "error")
        return ValidateResponse(
            ok=errors == 0,
            errors=errors,
            warnings=len(diagnostics) - errors,
            diagnostics=[vars(d) for d in diagnostics],
        )

    @app.post("/api/run")
    def http_run(req: RunRequest) -> PlainTextResponse:
        try:
            scenario = _parse_payload(req.scenario)
            events = [e.to_event() for e in req.trace]
            log = run_trace(scenario, events, req.horizon, req.seed)
        except (FormatError, InvalidScenario) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return PlainTextResponse(log.export(), media_type="application/x-ndjson")

    @app.post("/api/analyze")
    def http_analyze(req: AnalyzeRequest) -> dict[str, Any]:
        try:
            scenario = _parse_payload(req.scenario)
            return analyze(scenario, req.kind, req.cell)
        except (FormatError, AnalysisError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    # -- websocket session protocol -------------------------------------------

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket) -> None:
        await ws.accept()
        state: SimState | None = None
        last_seq = -1  # log cursor for this connection's pushes/snapshots

        async def send(msg_id: Any, msg_type: str, body: dict[str, Any]) -> None:
            await ws.send_text(json.dumps(
                {"id": msg_id, "type": msg_type, "body": body},
                ensure_ascii=False, sort_keys=True))

        async def push_events(st: SimState) -> None:
            nonlocal last_seq
            records = [r.to_obj() for r in st.log.records if r.seq > last_seq]
            if records:
                last_seq = records[-1]["seq"]
                await send(None, "events", {"records": records})

        await send(None, "hello", {"protocol": PROTOCOL_VERSION, "service": "causaldeck",
                                   "version": __version__})
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    env = Envelope.model_validate_json(raw)
                except ValidationError:
                    await send(None, "error",
                               {"code": "bad-message", "message": "malformed envelope"})
                    continue
                try:
                    if env.type == "load":
                        body = LoadBody.model_validate(env.body)
                        try:
                            scenario = _parse_payload(body.scenario)
                        except FormatError as exc:
                            await send(env.id, "error",
                                       {"code": "invalid-scenario", "message": str(exc)})
                            continue
                        diagnostics = [vars(d) for d in validate_scenario(scenario)]
                        if any(d["severity"] == "error" for d in diagnostics):
                            await send(env.id, "loaded",
                                       {"ok": False, "diagnostics": diagnostics})
                            continue
                        state = init_session(scenario, body.seed)
                        last_seq = -1
                        if body.session:
                            registry.register(body.session, state)
                        await send(env.id, "loaded",
                                   {"ok": True, "diagnostics": diagnostics,
                                    "session": body.session,
                                    "scenario": state.content_hash})
                    elif env.type == "step":
                        if state is None:
                            await send(env.id, "error",
                                       {"code": "no-session", "message": "load a scenario first"})
                            continue
                        body = StepBody.model_validate(env.body)
                        for _ in range(body.n):
                            state.step()
                        await push_events(state)
                        await send(env.id, "state", snapshot_doc(state, last_seq))
                    elif env.type == "input":
                        if state is None:
                            await send(env.id, "error",
                                       {"code": "no-session", "message": "load a scenario first"})
                            continue
                        event = EventBody.model_validate(env.body).to_event(state.tick)
                        state.apply_player_input(event)
                        await push_events(state)
                        await send(env.id, "state", snapshot_doc(state, last_seq))
                    elif env.type == "snapshot":
                        body = SnapshotBody.model_validate(env.body)
                        if body.session:
                            named = registry.get(body.session)
                            if named is None:
                                await send(env.id, "error",
                                           {"code": "no-session",
                                            "message": f"no session named {body.session!r}"})
                                continue
                            shared, lock = named
                            async with lock:
                                await send(env.id, "state", snapshot_doc(shared, -1))
                            continue
                        if state is None:
                            await send(env.id, "error",
                                       {"code": "no-session", "message": "load a scenario first"})
                            continue
                        snap = snapshot_doc(state, last_seq)
                        last_seq = snap["last_seq"]
                        await send(env.id, "state", snap)
                    elif env.type == "run_trace":
                        if state is None:
                            await send(env.id, "error",
                                       {"code": "no-session", "message": "load a scenario first"})
                            continue
                        body = RunTraceBody.model_validate(env.body)
                        seed = body.seed if body.seed is not None else state.seed
                        log = run_trace(state.scenario, [e.to_event() for e in body.trace],
                                        body.horizon, seed)
                        await send(env.id, "events",
                                   {"records": [r.to_obj() for r in log.records]})
                    elif env.type == "analyze":
                        body = AnalyzeBody.model_validate(env.body)
                        target = state
                        if body.session:
                            named = registry.get(body.session)
                            target = named[0] if named else None
                        if target is None:
                            await send(env.id, "error",
                                       {"code": "no-session", "message": "load a scenario first"})
                            continue
                        await send(env.id, "analysis",
                                   {"result": analyze(target.scenario, body.kind, body.cell)})
                    else:
                        await send(env.id, "error",
                                   {"code": "bad-message",
                                    "message": f"unknown message type {env.type!r}"})
                except (ValidationError, AnalysisError) as exc:
                    await send(env.id, "error", {"code": "bad-message", "message": str(exc)})
                except InvalidScenario as exc:
                    await send(env.id, "error", {"code": "invalid-scenario", "message": str(exc)})
        except WebSocketDisconnect:
            return

    if studio_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/studio", StaticFiles(directory=studio_dir, html=True), name="studio")
    return app


def run_server(host: str = DEFAULT_HOST, port: int = DEFAULT_PORT,
               studio_dir: str | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(studio_dir), host=host, port=port, log_level="warning")
