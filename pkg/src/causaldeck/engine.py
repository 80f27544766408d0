"""Deterministic discrete-tick executor.

A session owns a mutable world cloned from a validated scenario and advances
it one tick at a time. Each ``step`` runs fixed phases:

1. release pending activations due this tick (records stamped this tick)
2. resolve triggers over every instance active at the start of the tick
3. advance command stacks for every active instance
4. retire completed instances
5. advance the tick counter

Firing a link at tick T schedules the target activation at T + 1 + delay, so
zero-delay consequences land exactly one tick after their "fired" record and
no same-tick trigger recursion is possible, even for feedback loops. Player
input activates instances immediately but their trigger effect is evaluated
starting the next tick. Active instances re-test their outgoing links every
tick (level-triggered); the cooldown table keyed by (link, target agent)
bounds re-fires, with a floor of one tick even for a configured cooldown of
0. All tie-breaking uses ascending id order, so a session is a pure function
of (scenario bytes, inputs, seed); the RNG is consumed only by spawn jitter.

Freezing an agent blocks it from *receiving* triggers; in-flight commands run
to completion and a frozen agent's active actions still fire their own links.
Deactivated agents are fully suspended: they neither receive triggers, nor
tick commands, nor act as trigger sources until reactivated.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable

from .format import Diagnostic, scenario_hash, validate_scenario
from .inputs import (
    GenerationError,
    RawInputEvent,
    TemplateGenerator,
    TextGenerator,
    evaluate_bindings,
)
from .model import (
    PLAYER_OWNER,
    ActionTemplate,
    AnyAction,
    Command,
    PlayerActionDef,
    Position,
    Scenario,
    distance_between,
)
from .spatial import SpatialIndex

MOVE_ARRIVE_TOL = 0.01  # scene units; within this of the target, snap exactly

LOG_KINDS = ("header", "activated", "fired", "command-started", "command-finished",
             "spoke", "spawned", "frozen", "warning")


class EngineError(Exception):
    pass


class InvalidScenario(EngineError):
    """The scenario has error diagnostics and cannot start a session."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__(f"scenario has {len(errors)} error diagnostic(s): "
                         + "; ".join(str(d) for d in errors[:5]))


@dataclass(slots=True)
class LogRecord:
    tick: int
    seq: int
    kind: str
    subject: str
    payload: dict[str, Any]

    def to_obj(self) -> dict[str, Any]:
        return {"tick": self.tick, "seq": self.seq, "kind": self.kind,
                "subject": self.subject, "payload": self.payload}


class EventLog:
    """Append-only, (tick, seq)-monotone record list; the determinism surface."""

    def __init__(self) -> None:
        self.records: list[LogRecord] = []
        self._seq = 0

    def append(self, tick: int, kind: str, subject: str, payload: dict[str, Any]) -> LogRecord:
        rec = LogRecord(tick, self._seq, kind, subject, payload)
        self._seq += 1
        self.records.append(rec)
        return rec

    def export(self) -> str:
        return export_records(r.to_obj() for r in self.records)


def export_records(records: Iterable[dict[str, Any]]) -> str:
    """Newline-delimited structured records, one JSON object per line.

    Compact separators and sorted keys make the bytes diffable and stable.
    """
    lines = [json.dumps(r, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
             for r in records]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(slots=True)
class WorldAgent:
    """Runtime clone of a scenario agent; the scenario itself is never mutated."""

    id: str
    prototype: str
    position: Position
    assigned: set[str]
    frozen: bool
    attributes: dict[str, Any]
    active: bool


@dataclass(slots=True)
class ActionInstance:
    """One execution of an action by one owner (an agent id or the player)."""

    action: str
    owner: str
    started_at: int
    eligible_from: int  # first tick this instance may act as a trigger source
    cursor: int = 0
    progress: int = 0
    status: str = "active"


class SimState:
    """Single-owner mutable session. Create via ``init_session``."""

    def __init__(self, scenario: Scenario, seed: int, generator: TextGenerator | None = None):
        self.scenario = scenario
        self.config = scenario.config
        self.seed = seed
        self.generator: TextGenerator = generator if generator is not None else TemplateGenerator()
        self.tick = 0
        self.rng = random.Random(seed)
        self.log = EventLog()
        self.content_hash = scenario_hash(scenario)
        self.agents: dict[str, WorldAgent] = {}
        self.player_pos = Position(0.0, 0.0, 0.0)
        self.instances: dict[tuple[str, str], ActionInstance] = {}  # (action, owner)
        self.cooldowns: dict[tuple[str, str], int] = {}  # (link, agent) -> earliest re-fire
        self.pending: list[tuple[int, int, str, str]] = []  # (fire_tick, n, link, agent)
        self.forced: list[tuple[int, int, str, str]] = []  # (tick, n, action, owner)
        self._pending_keys: dict[tuple[str, str], int] = {}  # (action, agent) -> count
        self.player_ready: dict[str, int] = {}
        self._push_n = 0
        self._spawn_n = 0

        self._actions: dict[str, AnyAction] = {a.id: a for a in scenario.actions}
        self._links_by_id = {l.id: l for l in scenario.links}
        self._links_by_source: dict[str, list] = {}
        for link in sorted(scenario.links, key=lambda l: l.id):
            self._links_by_source.setdefault(link.source, []).append(link)

        radii = [a.impact_radius for a in scenario.templates()]
        radii += [a.range for a in scenario.player_actions()]
        self.spatial = SpatialIndex(max([r for r in radii if r > 0], default=1.0))
        for ag in scenario.agents:
            clone = WorldAgent(ag.id, ag.prototype, ag.position, set(ag.assigned),
                               ag.frozen, dict(ag.attributes), ag.active)
            self.agents[clone.id] = clone
            self.spatial.insert(clone.id, clone.position)

    # -- helpers -----------------------------------------------------------

    def _eff_cooldown(self, action: AnyAction) -> int:
        return self.scenario.effective_cooldown(action)

    def _log(self, kind: str, subject: str, payload: dict[str, Any]) -> None:
        self.log.append(self.tick, kind, subject, payload)

    def _warn(self, subject: str, reason: str, **extra: Any) -> None:
        self._log("warning", subject, {"reason": reason, **extra})

    def _owner_position(self, owner: str) -> Position:
        return self.player_pos if owner == PLAYER_OWNER else self.agents[owner].position

    def _activate(self, action_id: str, owner: str, eligible_from: int) -> ActionInstance:
        inst = ActionInstance(action=action_id, owner=owner, started_at=self.tick,
                              eligible_from=eligible_from)
        self.instances[(action_id, owner)] = inst
        self._log("activated", action_id, {"owner": owner})
        return inst

    def _push_pending(self, fire_tick: int, link_id: str, agent_id: str, action_id: str) -> None:
        self._push_n += 1
        heapq.heappush(self.pending, (fire_tick, self._push_n, link_id, agent_id))
        key = (action_id, agent_id)
        self._pending_keys[key] = self._pending_keys.get(key, 0) + 1

    def _push_forced(self, tick: int, action_id: str, owner: str) -> None:
        self._push_n += 1
        heapq.heappush(self.forced, (tick, self._push_n, action_id, owner))

    # -- phase 1: pending releases ------------------------------------------

    def _release_due(self) -> None:
        t = self.tick
        while self.pending and self.pending[0][0] <= t:
            _, _, link_id, agent_id = heapq.heappop(self.pending)
            action_id = self._links_by_id[link_id].target
            key = (action_id, agent_id)
            count = self._pending_keys.get(key, 0) - 1
            if count > 0:
                self._pending_keys[key] = count
            else:
                self._pending_keys.pop(key, None)

            agent = self.agents.get(agent_id)
            if agent is None or not agent.active:
                self._warn(action_id, "activation-dropped", owner=agent_id, link=link_id)
                continue
            template = self._actions[action_id]
            existing = self.instances.get(key)
            if existing is not None:
                if isinstance(template, ActionTemplate) and template.interruptible:
                    existing.cursor = 0
                    existing.progress = 0
                    existing.started_at = t
                    existing.eligible_from = t
                    self._log("activated", action_id, {"owner": agent_id, "restart": True})
                else:
                    self._warn(action_id, "activation-dropped", owner=agent_id, link=link_id)
                continue
            self._activate(action_id, agent_id, eligible_from=t)

    # -- phase 2: trigger resolution -----------------------------------------

    def resolve_triggers(self) -> list[tuple[str, str]]:
        """Fire links of every eligible source; returns (link, target) firings.

        Iteration order is ascending (owner, action), then link id, then
        target agent id, which deterministically resolves all fan-in ties.
        """
        t = self.tick
        sources: set[tuple[str, str]] = set()
        for (action_id, owner), inst in self.instances.items():
            if inst.eligible_from > t or inst.status != "active":
                continue
            if owner != PLAYER_OWNER and not self.agents[owner].active:
                continue  # suspended with its agent
            sources.add((owner, action_id))
        while self.forced and self.forced[0][0] <= t:
            _, _, action_id, owner = heapq.heappop(self.forced)
            if owner != PLAYER_OWNER:
                agent = self.agents.get(owner)
                if agent is None or not agent.active:
                    continue
            sources.add((owner, action_id))

        firings: list[tuple[str, str]] = []
        for owner, action_id in sorted(sources):
            links = self._links_by_source.get(action_id)
            if not links:
                continue
            action = self._actions[action_id]
            radius = action.range if isinstance(action, PlayerActionDef) else action.impact_radius
            origin = self._owner_position(owner)
            in_range: list[tuple[str, float]] = []
            for gid in self.spatial.query(origin, radius):
                d = distance_between(origin, self.agents[gid].position)
                if d <= radius:
                    in_range.append((gid, d))
            in_range.sort()
            for link in links:
                target_action = self._actions[link.target]
                interruptible = (isinstance(target_action, ActionTemplate)
                                 and target_action.interruptible)
                for gid, dist in in_range:
                    agent = self.agents[gid]
                    if not agent.active or agent.frozen:
                        continue
                    if link.target not in agent.assigned:
                        continue
                    key = (link.target, gid)
                    if not interruptible and (key in self.instances
                                              or self._pending_keys.get(key, 0) > 0):
                        continue
                    if self.cooldowns.get((link.id, gid), 0) > t:
                        continue
                    self._log("fired", link.id, {
                        "source": action_id, "src_owner": owner,
                        "target": link.target, "dst_owner": gid,
                        "distance": dist, "radius": float(radius), "delay": link.delay,
                    })
                    self.cooldowns[(link.id, gid)] = t + max(self._eff_cooldown(action), 1)
                    self._push_pending(t + 1 + link.delay, link.id, gid, link.target)
                    firings.append((link.id, gid))
        return firings

    # -- phase 3: command execution -------------------------------------------

    def _move_agent(self, agent: WorldAgent, pos: Position) -> None:
        agent.position = pos
        self.spatial.move(agent.id, pos)

    def _advance_movement(self, inst: ActionInstance, cmd: Command) -> bool:
        agent = self.agents[inst.owner]
        inst.progress += 1
        if cmd.kind == "move-to":
            tx, ty, tz = cmd.params["target"]
            target = Position(float(tx), float(ty), float(tz))
            step_len = cmd.params["speed"] * self.config.tick_ms / 1000.0
            d = distance_between(agent.position, target)
            if d - step_len <= MOVE_ARRIVE_TOL:
                self._move_agent(agent, target)
                return True
            f = step_len / d
            self._move_agent(agent, Position(
                agent.position.x + (target.x - agent.position.x) * f,
                agent.position.y + (target.y - agent.position.y) * f,
                agent.position.z + (target.z - agent.position.z) * f,
            ))
            return False
        # follow: re-target every tick; completes when its duration elapses
        target_agent = self.agents.get(cmd.params.get("target", ""))
        if target_agent is not None and target_agent.id != agent.id:
            d = distance_between(agent.position, target_agent.position)
            step_len = min(cmd.params["speed"] * self.config.tick_ms / 1000.0, d)
            if d > 0.0:
                f = step_len / d
                self._move_agent(agent, Position(
                    agent.position.x + (target_agent.position.x - agent.position.x) * f,
                    agent.position.y + (target_agent.position.y - agent.position.y) * f,
                    agent.position.z + (target_agent.position.z - agent.position.z) * f,
                ))
        return inst.progress >= cmd.duration

    def _radius_targets(self, origin: Position, radius: float) -> list[str]:
        hits = [gid for gid in self.spatial.query(origin, radius)
                if distance_between(origin, self.agents[gid].position) <= radius]
        return sorted(hits)

    def _do_spawn(self, inst: ActionInstance, cmd: Command) -> dict[str, Any]:
        proto_id = cmd.params["prototype"]
        proto = self.scenario.find_prototype(proto_id)
        if len(self.agents) >= self.config.max_agents:
            self._warn(inst.action, "spawn-cap", owner=inst.owner, prototype=proto_id,
                       max_agents=self.config.max_agents)
            return {"spawned": None}
        self._spawn_n += 1
        new_id = f"{proto_id}-{self._spawn_n}"
        while new_id in self.agents:
            self._spawn_n += 1
            new_id = f"{proto_id}-{self._spawn_n}"
        ox, oy, oz = cmd.params.get("offset", (0.0, 0.0, 0.0))
        jitter = cmd.params.get("jitter", 0)
        jx = jy = jz = 0.0
        if jitter:
            jx = self.rng.uniform(-jitter, jitter)
            jy = self.rng.uniform(-jitter, jitter)
            jz = self.rng.uniform(-jitter, jitter)
        base = self._owner_position(inst.owner)
        pos = Position(base.x + ox + jx, base.y + oy + jy, base.z + oz + jz)
        clone = WorldAgent(new_id, proto_id, pos, set(proto.assigned), proto.frozen,
                           dict(proto.attributes), True)
        self.agents[new_id] = clone
        self.spatial.insert(new_id, pos)
        self._log("spawned", new_id,
                  {"prototype": proto_id, "by": inst.owner, "position": pos.as_list()})
        return {"spawned": new_id}

    def _set_frozen(self, inst: ActionInstance, cmd: Command, frozen: bool) -> dict[str, Any]:
        mode = cmd.params.get("target", "self")
        if mode == "self":
            candidates = [inst.owner] if inst.owner in self.agents else []
        else:
            candidates = self._radius_targets(self._owner_position(inst.owner),
                                              cmd.params["radius"])
        changed: list[str] = []
        for gid in candidates:
            agent = self.agents[gid]
            if agent.frozen != frozen:
                agent.frozen = frozen
                self._log("frozen", gid, {"frozen": frozen, "by": inst.owner})
                changed.append(gid)
        return {"targets": changed}

    def _speak(self, inst: ActionInstance, cmd: Command) -> dict[str, Any]:
        if cmd.kind == "speak-text":
            text, generated = cmd.params["text"], False
        else:
            prompt = cmd.params["prompt"]
            persona = self.agents[inst.owner].attributes if inst.owner in self.agents else {}
            try:
                text, generated = self.generator.generate(prompt, persona), True
            except GenerationError as exc:
                self._warn(inst.action, "generator-failure", owner=inst.owner, detail=str(exc))
                text, generated = prompt, False
        self._log("spoke", inst.owner, {"action": inst.action, "text": text,
                                        "generated": generated})
        return {}

    def _apply_completion(self, inst: ActionInstance, cmd: Command) -> dict[str, Any]:
        agent = self.agents.get(inst.owner)
        attrs = agent.attributes if agent is not None else {}
        kind, p = cmd.kind, cmd.params
        if kind in ("standby", "move-to", "follow", "play-clip", "vfx-play"):
            return {}  # movement/timed kinds have no completion side effect
        if kind == "instant-trigger":
            self._push_forced(self.tick + 1, inst.action, inst.owner)
            return {}
        if kind == "delayed-trigger":
            delay = max(p["delay"], 1)
            self._push_forced(self.tick + delay, inst.action, inst.owner)
            return {"delay": delay}
        if kind in ("freeze", "defrost"):
            return self._set_frozen(inst, cmd, kind == "freeze")
        if kind in ("speak-text", "speak-generated"):
            return self._speak(inst, cmd)
        if kind == "play-sound":
            return {"clip": p["clip"]}
        if kind == "spawn":
            return self._do_spawn(inst, cmd)
        if kind in ("activate-agent", "deactivate-agent"):
            gid = inst.owner if p["target"] == "self" else p["target"]
            target = self.agents.get(gid)
            if target is None:
                self._warn(inst.action, "unknown-agent", owner=inst.owner, target=gid)
                return {"target": None, "active": kind == "activate-agent"}
            target.active = kind == "activate-agent"
            return {"target": gid, "active": target.active}
        if kind == "color-change":
            attrs["color"] = p["color"]
            return {"color": p["color"]}
        if kind == "material-change":
            attrs["material"] = p["material"]
            return {"material": p["material"]}
        if kind == "vfx-stop":
            attrs["vfx"] = ""
            return {"vfx": ""}
        if kind in ("appear", "disappear"):
            attrs["visible"] = kind == "appear"
            return {"visible": attrs["visible"]}
        if kind == "stop-clip":
            attrs["animation"] = ""
            return {"animation": ""}
        if kind == "state-change":
            attrs["anim_state"] = p["state"]
            return {"anim_state": p["state"]}
        if kind == "rotate":
            attrs["rotation"] = (float(attrs.get("rotation", 0.0)) + p["angle"]) % 360.0
            return {"rotation": attrs["rotation"]}
        if kind == "scale":
            attrs["scale"] = float(attrs.get("scale", 1.0)) * p["factor"]
            return {"scale": attrs["scale"]}
        if kind == "set-attribute":
            attrs[p["name"]] = p.get("value")
            return {"name": p["name"], "value": p.get("value")}
        if kind == "custom-hook":
            return {"name": p["name"], "args": p.get("args")}
        raise EngineError(f"unhandled command kind {kind!r}")

    def _apply_start_effects(self, inst: ActionInstance, cmd: Command) -> None:
        # Visible-while-running kinds flip the attribute at start, not finish.
        agent = self.agents.get(inst.owner)
        if agent is None:
            return
        if cmd.kind == "play-clip":
            agent.attributes["animation"] = cmd.params["clip"]
        elif cmd.kind == "vfx-play":
            agent.attributes["vfx"] = cmd.params["name"]

    def _tick_instance(self, inst: ActionInstance) -> None:
        action = self._actions[inst.action]
        if isinstance(action, PlayerActionDef):
            # Player instances carry no commands; they live through exactly one
            # resolve opportunity and then retire.
            if self.tick >= inst.eligible_from:
                inst.status = "completed"
            return
        commands = action.commands
        ticked_durational = False
        while inst.status == "active":
            if inst.cursor >= len(commands):
                inst.status = "completed"
                return
            cmd = commands[inst.cursor]
            durational = cmd.kind == "move-to" or cmd.duration >= 1
            if durational and ticked_durational:
                return  # at most one time-consuming command advances per tick
            if inst.progress == 0:
                self._log("command-started", inst.action,
                          {"owner": inst.owner, "index": inst.cursor, "kind": cmd.kind})
                self._apply_start_effects(inst, cmd)
            if durational:
                ticked_durational = True
                if cmd.kind in ("move-to", "follow"):
                    done = self._advance_movement(inst, cmd)
                else:
                    inst.progress += 1
                    done = inst.progress >= cmd.duration
                if not done:
                    return
            payload = self._apply_completion(inst, cmd)
            self._log("command-finished", inst.action,
                      {"owner": inst.owner, "index": inst.cursor, "kind": cmd.kind, **payload})
            inst.cursor += 1
            inst.progress = 0

    # -- public session operations ---------------------------------------------

    def apply_player_input(self, ev: RawInputEvent) -> list[str]:
        """Match an input event and activate ready player actions this tick.

        Unmatched or fully gated input logs a single warning record; matched
        activations take trigger effect starting next tick. Returns the ids
        of the actions activated.
        """
        t = self.tick
        if ev.method == "gesture" and ev.position is not None:
            self.player_pos = ev.position
        positions = {aid: ag.position for aid, ag in self.agents.items() if ag.active}
        matched, rejected = evaluate_bindings(ev, self.scenario.player_actions(), positions,
                                              self.scenario.intent_lexicon)
        activated: list[str] = []
        blocked_active = blocked_cooldown = False
        for action_id in matched:
            if (action_id, PLAYER_OWNER) in self.instances:
                blocked_active = True
                continue
            if self.player_ready.get(action_id, 0) > t:
                blocked_cooldown = True
                continue
            self._activate(action_id, PLAYER_OWNER, eligible_from=t + 1)
            self.player_ready[action_id] = t + max(self._eff_cooldown(self._actions[action_id]), 1)
            activated.append(action_id)
        if not activated:
            if blocked_active:
                reason = "already-active"
            elif blocked_cooldown:
                reason = "cooldown"
            elif any(r == "out-of-range" for _, r in rejected):
                reason = "out-of-range"
            else:
                reason = "unmatched-input"
            detail = ev.symbol or ev.utterance or ev.gesture or ""
            if ev.target:
                detail = f"{detail}:{ev.target}"
            self._warn("input", reason, method=ev.method, input=detail)
        return activated

    def step(self) -> None:
        """Execute one tick (see the module docstring for the phase order)."""
        self._release_due()
        self.resolve_triggers()
        for _, inst in sorted(self.instances.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if inst.owner != PLAYER_OWNER and not self.agents[inst.owner].active:
                continue  # suspended
            if inst.status == "active":
                self._tick_instance(inst)
        for key in [k for k, i in self.instances.items() if i.status == "completed"]:
            del self.instances[key]
        self.tick += 1

    def active_actions(self, owner: str) -> list[str]:
        return sorted(a for (a, o) in self.instances if o == owner)


def init_session(scenario: Scenario, seed: int | None = None,
                 generator: TextGenerator | None = None) -> SimState:
    """Validate and start a session at tick 0.

    The log opens with a header record embedding the seed and the scenario
    content hash; auto-start actions activate immediately on every agent they
    are assigned to.
    """
    diagnostics = validate_scenario(scenario)
    if any(d.severity == "error" for d in diagnostics):
        raise InvalidScenario(diagnostics)
    seed = scenario.config.rng_seed if seed is None else seed
    st = SimState(scenario, seed, generator)
    st.log.append(0, "header", "session", {"scenario": st.content_hash, "seed": seed})
    auto = {a.id for a in scenario.templates() if a.auto_start}
    if auto:
        for agent in sorted(scenario.agents, key=lambda a: a.id):
            if not agent.active:
                continue
            for action_id in sorted(agent.assigned & auto):
                st._activate(action_id, agent.id, eligible_from=0)
    return st


def run_trace(scenario: Scenario, trace: list[RawInputEvent], horizon: int,
              seed: int | None = None, generator: TextGenerator | None = None) -> EventLog:
    """Headless batch run: init, apply trace inputs at their ticks, step to
    the horizon. Bit-identical output for identical arguments."""
    ticks = [ev.tick for ev in trace]
    if ticks != sorted(ticks):
        raise EngineError("trace events must be sorted by tick")
    st = init_session(scenario, seed, generator)
    i = 0
    while st.tick < horizon:
        while i < len(trace) and trace[i].tick == st.tick:
            st.apply_player_input(trace[i])
            i += 1
        st.step()
    return st.log
