"""Scenario document format: parsing, validation, canonical serialization.

One scenario per UTF-8 ``.cvr.json`` file. Top-level fields: ``version``,
``config``, ``agents``, ``prototypes``, ``actions``, ``links``,
``intent_lexicon``. Unknown fields are schema errors unless prefixed with
``x-``, which are preserved verbatim for round-tripping.

The parser enforces document *structure* (types, enums, required fields);
referential integrity and value ranges are reported by ``validate_scenario``
as diagnostics so that authoring tools can show every problem at once:

errors
  E001 dangling reference (link endpoint or assigned action undefined)
  E002 player action used as a link target
  E003 duplicate id within a namespace
  E004 spawn command names an unknown prototype
  E005 invalid parameter value (negative radius/cooldown/delay, bad command
       params, non-positive tick_ms, ...)
  E006 two player actions share an identical input binding
  E007 intent binding names an unregistered lexicon category
  E008 reserved id ("player") used for an agent or prototype
  E009 max_agents below the scenario's own agent count
  E010 player action listed in an agent's assigned set

warnings
  W001 agent action never assigned to any agent or prototype
  W002 action unreachable from any player action or auto-start action
  W003 link delay exceeds the configured horizon
  W004 self-loop whose effective cooldown is 0 (engine clamps re-fire
       spacing to 1 tick, keeping the loop bounded)

Canonical form: object keys sorted, entity lists in id order, floats in
shortest round-trip form, two-space indent, trailing newline. Parsing
normalizes entity list order to id order, so ``parse(serialize(s))``
structurally equals ``s`` and serialization is idempotent byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any

from .model import (
    CATEGORY_BY_KIND,
    GESTURE_KINDS,
    INPUT_METHODS,
    LANGUAGE_MODES,
    PLAYER_OWNER,
    ActionTemplate,
    Agent,
    AnyAction,
    CausalLink,
    Command,
    InputBinding,
    PlayerActionDef,
    Position,
    Scenario,
    SimConfig,
)

FORMAT_VERSION = "1.0"
FILE_EXTENSION = ".cvr.json"


class FormatError(Exception):
    """Base class for document load failures."""


class DocumentSyntaxError(FormatError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(FormatError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class VersionError(FormatError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    location: str  # path into the document, e.g. /links/0/target
    message: str

    def __str__(self) -> str:
        return f"{self.severity.upper()} {self.code} {self.location}: {self.message}"


DIAGNOSTIC_CODES = {
    "E001": "dangling-reference",
    "E002": "player-link-target",
    "E003": "duplicate-id",
    "E004": "unknown-prototype",
    "E005": "bad-parameter",
    "E006": "duplicate-binding",
    "E007": "unknown-intent",
    "E008": "reserved-id",
    "E009": "agent-cap",
    "E010": "player-assigned",
    "W001": "unassigned-action",
    "W002": "unreachable-action",
    "W003": "long-delay",
    "W004": "zero-cooldown-self-loop",
}


# ---------------------------------------------------------------------------
# parsing helpers


def _reject_constant(value: str) -> Any:
    raise ValueError(f"non-finite number literal {value!r} is not allowed")


def _obj(v: Any, path: str) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(f"expected an object, got {type(v).__name__}", path)
    return v


def _list(v: Any, path: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(f"expected a list, got {type(v).__name__}", path)
    return v


def _str(v: Any, path: str, nonempty: bool = False) -> str:
    if not isinstance(v, str):
        raise SchemaError(f"expected a string, got {type(v).__name__}", path)
    if nonempty and not v:
        raise SchemaError("string must be non-empty", path)
    return v


def _num(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"expected a number, got {type(v).__name__}", path)
    return float(v)


def _int(v: Any, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"expected an integer, got {type(v).__name__}", path)
    return v


def _bool(v: Any, path: str) -> bool:
    if not isinstance(v, bool):
        raise SchemaError(f"expected a boolean, got {type(v).__name__}", path)
    return v


def _scalar(v: Any, path: str) -> Any:
    if v is None or isinstance(v, (str, int, float, bool)):
        return v
    raise SchemaError(f"expected a scalar, got {type(v).__name__}", path)


def _extras(obj: dict, known: set[str], path: str) -> dict[str, Any]:
    """Split off x- extension fields; any other unknown key is a schema error."""
    out: dict[str, Any] = {}
    for key in obj:
        if key in known:
            continue
        if key.startswith("x-"):
            out[key] = obj[key]
        else:
            raise SchemaError(f"unknown field {key!r}", f"{path}/{key}")
    return out


def _position(v: Any, path: str) -> Position:
    items = _list(v, path)
    if len(items) != 3:
        raise SchemaError("position must be a list of three numbers", path)
    return Position(*(_num(items[i], f"{path}/{i}") for i in range(3)))


def _check_version(version: str) -> None:
    major = version.split(".", 1)[0]
    if major != FORMAT_VERSION.split(".", 1)[0]:
        raise VersionError(
            f"unsupported format version {version!r} (this build reads major version "
            f"{FORMAT_VERSION.split('.', 1)[0]})"
        )


def _parse_config(v: Any, path: str) -> SimConfig:
    obj = _obj(v, path)
    known = {"tick_ms", "max_agents", "default_cooldown", "rng_seed"}
    cfg = SimConfig(extras=_extras(obj, known, path))
    if "tick_ms" in obj:
        cfg.tick_ms = _int(obj["tick_ms"], f"{path}/tick_ms")
    if "max_agents" in obj:
        cfg.max_agents = _int(obj["max_agents"], f"{path}/max_agents")
    if "default_cooldown" in obj:
        cfg.default_cooldown = _int(obj["default_cooldown"], f"{path}/default_cooldown")
    if "rng_seed" in obj:
        cfg.rng_seed = _int(obj["rng_seed"], f"{path}/rng_seed")
    return cfg


def _parse_command(v: Any, path: str) -> Command:
    obj = _obj(v, path)
    known = {"kind", "category", "params", "duration"}
    extras = _extras(obj, known, path)
    if "kind" not in obj:
        raise SchemaError("command requires a kind", path)
    kind = _str(obj["kind"], f"{path}/kind", nonempty=True)
    if kind not in CATEGORY_BY_KIND:
        raise SchemaError(f"unknown command kind {kind!r}", f"{path}/kind")
    category = CATEGORY_BY_KIND[kind]
    if "category" in obj:
        declared = _str(obj["category"], f"{path}/category")
        if declared != category:
            raise SchemaError(
                f"kind {kind!r} belongs to category {category!r}, not {declared!r}",
                f"{path}/category",
            )
    params = dict(_obj(obj.get("params", {}), f"{path}/params"))
    duration = _int(obj.get("duration", 0), f"{path}/duration")
    return Command(kind=kind, params=params, duration=duration, category=category, extras=extras)


def _parse_binding(v: Any, path: str) -> InputBinding:
    obj = _obj(v, path)
    known = {"method", "symbol", "mode", "category", "gesture", "target", "distance"}
    extras = _extras(obj, known, path)
    if "method" not in obj:
        raise SchemaError("binding requires a method", path)
    method = _str(obj["method"], f"{path}/method")
    if method not in INPUT_METHODS:
        raise SchemaError(f"unknown input method {method!r}", f"{path}/method")
    b = InputBinding(method=method, extras=extras)
    if method == "device":
        if "symbol" not in obj:
            raise SchemaError("device binding requires a symbol", path)
        b.symbol = _str(obj["symbol"], f"{path}/symbol", nonempty=True)
    elif method == "language":
        if "mode" not in obj:
            raise SchemaError("language binding requires a mode", path)
        b.mode = _str(obj["mode"], f"{path}/mode")
        if b.mode not in LANGUAGE_MODES:
            raise SchemaError(f"unknown language mode {b.mode!r}", f"{path}/mode")
        if b.mode == "intent":
            if "category" not in obj:
                raise SchemaError("intent binding requires a category", path)
            b.category = _str(obj["category"], f"{path}/category", nonempty=True)
    else:  # gesture
        if "gesture" not in obj:
            raise SchemaError("gesture binding requires a gesture kind", path)
        b.gesture = _str(obj["gesture"], f"{path}/gesture")
        if b.gesture not in GESTURE_KINDS:
            raise SchemaError(f"unknown gesture kind {b.gesture!r}", f"{path}/gesture")
        if "target" in obj:
            b.target = _str(obj["target"], f"{path}/target", nonempty=True)
        if "distance" in obj:
            b.distance = _num(obj["distance"], f"{path}/distance")
    return b


def _parse_action(v: Any, path: str) -> AnyAction:
    obj = _obj(v, path)
    if "kind" not in obj:
        raise SchemaError("action requires a kind (agent or player)", path)
    kind = _str(obj["kind"], f"{path}/kind")
    if "id" not in obj:
        raise SchemaError("action requires an id", path)
    action_id = _str(obj["id"], f"{path}/id", nonempty=True)
    if kind == "agent":
        known = {"kind", "id", "label", "commands", "impact_radius", "cooldown",
                 "interruptible", "auto_start"}
        extras = _extras(obj, known, path)
        if "commands" not in obj:
            raise SchemaError("agent action requires a command stack", path)
        raw = _list(obj["commands"], f"{path}/commands")
        if not raw:
            raise SchemaError("command stack must be non-empty", f"{path}/commands")
        commands = [_parse_command(c, f"{path}/commands/{i}") for i, c in enumerate(raw)]
        return ActionTemplate(
            id=action_id,
            commands=commands,
            impact_radius=_num(obj.get("impact_radius", 0.0), f"{path}/impact_radius"),
            cooldown=_int(obj["cooldown"], f"{path}/cooldown") if "cooldown" in obj else None,
            interruptible=_bool(obj.get("interruptible", False), f"{path}/interruptible"),
            auto_start=_bool(obj.get("auto_start", False), f"{path}/auto_start"),
            label=_str(obj.get("label", ""), f"{path}/label"),
            extras=extras,
        )
    if kind == "player":
        known = {"kind", "id", "binding", "range", "cooldown"}
        extras = _extras(obj, known, path)
        if "binding" not in obj:
            raise SchemaError("player action requires a binding", path)
        return PlayerActionDef(
            id=action_id,
            binding=_parse_binding(obj["binding"], f"{path}/binding"),
            range=_num(obj.get("range", 0.0), f"{path}/range"),
            cooldown=_int(obj["cooldown"], f"{path}/cooldown") if "cooldown" in obj else None,
            extras=extras,
        )
    raise SchemaError(f"unknown action kind {kind!r}", f"{path}/kind")


def _parse_agent(v: Any, path: str) -> Agent:
    obj = _obj(v, path)
    known = {"id", "prototype", "position", "assigned", "frozen", "attributes", "active"}
    extras = _extras(obj, known, path)
    if "id" not in obj:
        raise SchemaError("agent requires an id", path)
    if "position" not in obj:
        raise SchemaError("agent requires a position", path)
    assigned = {
        _str(a, f"{path}/assigned/{i}", nonempty=True)
        for i, a in enumerate(_list(obj.get("assigned", []), f"{path}/assigned"))
    }
    attrs_obj = _obj(obj.get("attributes", {}), f"{path}/attributes")
    attributes = {k: _scalar(val, f"{path}/attributes/{k}") for k, val in attrs_obj.items()}
    return Agent(
        id=_str(obj["id"], f"{path}/id", nonempty=True),
        position=_position(obj["position"], f"{path}/position"),
        prototype=_str(obj.get("prototype", ""), f"{path}/prototype"),
        assigned=assigned,
        frozen=_bool(obj.get("frozen", False), f"{path}/frozen"),
        attributes=attributes,
        active=_bool(obj.get("active", True), f"{path}/active"),
        extras=extras,
    )


def _parse_link(v: Any, path: str) -> CausalLink:
    obj = _obj(v, path)
    known = {"id", "source", "target", "delay"}
    extras = _extras(obj, known, path)
    for key in ("id", "source", "target"):
        if key not in obj:
            raise SchemaError(f"link requires {key}", path)
    return CausalLink(
        id=_str(obj["id"], f"{path}/id", nonempty=True),
        source=_str(obj["source"], f"{path}/source", nonempty=True),
        target=_str(obj["target"], f"{path}/target", nonempty=True),
        delay=_int(obj.get("delay", 0), f"{path}/delay"),
        extras=extras,
    )


def scenario_from_obj(data: Any) -> Scenario:
    """Build a Scenario from an already-decoded document tree."""
    obj = _obj(data, "/")
    known = {"version", "config", "agents", "prototypes", "actions", "links", "intent_lexicon"}
    extras = _extras(obj, known, "")
    if "version" not in obj:
        raise SchemaError("document requires a version field", "/version")
    version = _str(obj["version"], "/version", nonempty=True)
    _check_version(version)

    lexicon: dict[str, list[str]] = {}
    for cat, words in _obj(obj.get("intent_lexicon", {}), "/intent_lexicon").items():
        items = _list(words, f"/intent_lexicon/{cat}")
        if not items:
            raise SchemaError("keyword list must be non-empty", f"/intent_lexicon/{cat}")
        lexicon[cat] = [
            _str(w, f"/intent_lexicon/{cat}/{i}", nonempty=True).lower()
            for i, w in enumerate(items)
        ]

    scenario = Scenario(
        version=version,
        config=_parse_config(obj.get("config", {}), "/config"),
        agents=[_parse_agent(a, f"/agents/{i}")
                for i, a in enumerate(_list(obj.get("agents", []), "/agents"))],
        prototypes=[_parse_agent(a, f"/prototypes/{i}")
                    for i, a in enumerate(_list(obj.get("prototypes", []), "/prototypes"))],
        actions=[_parse_action(a, f"/actions/{i}")
                 for i, a in enumerate(_list(obj.get("actions", []), "/actions"))],
        links=[_parse_link(l, f"/links/{i}")
               for i, l in enumerate(_list(obj.get("links", []), "/links"))],
        intent_lexicon=lexicon,
        extras=extras,
    )
    return scenario


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario document. Raises DocumentSyntaxError, SchemaError, or
    VersionError; on success every structural invariant holds."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    except ValueError as exc:
        raise DocumentSyntaxError(str(exc)) from exc
    return scenario_from_obj(data)


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# validation


def _check_command_params(cmd: Command, path: str, s: Scenario, out: list[Diagnostic]) -> None:
    def bad(msg: str, sub: str = "") -> None:
        out.append(Diagnostic("error", "E005", path + sub, msg))

    p = cmd.params
    if cmd.duration < 0:
        bad("duration must be >= 0", "/duration")
    if cmd.kind == "standby" and cmd.duration < 1:
        bad("standby requires duration >= 1", "/duration")
    if cmd.kind in ("move-to", "follow"):
        speed = p.get("speed")
        if not isinstance(speed, (int, float)) or isinstance(speed, bool) or speed <= 0:
            bad(f"{cmd.kind} requires speed > 0", "/params/speed")
    if cmd.kind == "move-to":
        target = p.get("target")
        if not (isinstance(target, list) and len(target) == 3
                and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in target)):
            bad("move-to requires a target position [x, y, z]", "/params/target")
    if cmd.kind == "follow" and not isinstance(p.get("target"), str):
        bad("follow requires a target agent id", "/params/target")
    if cmd.kind == "spawn":
        proto = p.get("prototype")
        if not isinstance(proto, str) or s.find_prototype(proto) is None:
            out.append(Diagnostic("error", "E004", path + "/params/prototype",
                                  f"spawn names unknown prototype {proto!r}"))
        jitter = p.get("jitter", 0)
        if isinstance(jitter, bool) or not isinstance(jitter, (int, float)) or jitter < 0:
            bad("spawn jitter must be a number >= 0", "/params/jitter")
        offset = p.get("offset", [0.0, 0.0, 0.0])
        if not (isinstance(offset, list) and len(offset) == 3
                and all(isinstance(c, (int, float)) and not isinstance(c, bool)
                        for c in offset)):
            bad("spawn offset must be [x, y, z]", "/params/offset")
    if cmd.kind == "delayed-trigger":
        delay = p.get("delay")
        if isinstance(delay, bool) or not isinstance(delay, int) or delay < 1:
            bad("delayed-trigger requires an integer delay >= 1", "/params/delay")
    if cmd.kind in ("freeze", "defrost"):
        mode = p.get("target", "self")
        if mode not in ("self", "radius"):
            bad(f"{cmd.kind} target must be 'self' or 'radius'", "/params/target")
        elif mode == "radius":
            r = p.get("radius")
            if isinstance(r, bool) or not isinstance(r, (int, float)) or r < 0:
                bad(f"{cmd.kind} with radius targeting requires radius >= 0", "/params/radius")
    if cmd.kind in ("activate-agent", "deactivate-agent") and not isinstance(p.get("target"), str):
        bad(f"{cmd.kind} requires a target agent id", "/params/target")
    required_str = {
        "speak-text": "text", "speak-generated": "prompt", "play-sound": "clip",
        "play-clip": "clip", "state-change": "state", "color-change": "color",
        "material-change": "material", "vfx-play": "name", "set-attribute": "name",
        "custom-hook": "name",
    }
    if cmd.kind in required_str and not isinstance(p.get(required_str[cmd.kind]), str):
        bad(f"{cmd.kind} requires a string {required_str[cmd.kind]!r} param",
            f"/params/{required_str[cmd.kind]}")
    if cmd.kind == "rotate":
        angle = p.get("angle")
        if isinstance(angle, bool) or not isinstance(angle, (int, float)):
            bad("rotate requires a numeric angle", "/params/angle")
    if cmd.kind == "scale":
        factor = p.get("factor")
        if isinstance(factor, bool) or not isinstance(factor, (int, float)) or factor <= 0:
            bad("scale requires factor > 0", "/params/factor")


def validate_scenario(s: Scenario, *, delay_horizon: int = 1000) -> list[Diagnostic]:
    """Report referential and range problems. Never raises; returns ordered
    diagnostics (errors first, then by code and location)."""
    out: list[Diagnostic] = []

    def err(code: str, loc: str, msg: str) -> None:
        out.append(Diagnostic("error", code, loc, msg))

    def warn(code: str, loc: str, msg: str) -> None:
        out.append(Diagnostic("warning", code, loc, msg))

    actions_by_id: dict[str, AnyAction] = {}
    for i, action in enumerate(s.actions):
        if action.id in actions_by_id:
            err("E003", f"/actions/{i}/id", f"duplicate action id {action.id!r}")
        else:
            actions_by_id[action.id] = action

    entity_ids: set[str] = set()
    for kind, entities in (("agents", s.agents), ("prototypes", s.prototypes)):
        for i, agent in enumerate(entities):
            if agent.id == PLAYER_OWNER:
                err("E008", f"/{kind}/{i}/id", f"id {PLAYER_OWNER!r} is reserved for the player")
            if agent.id in entity_ids:
                err("E003", f"/{kind}/{i}/id", f"duplicate agent id {agent.id!r}")
            entity_ids.add(agent.id)

    link_ids: set[str] = set()
    for i, link in enumerate(s.links):
        if link.id in link_ids:
            err("E003", f"/links/{i}/id", f"duplicate link id {link.id!r}")
        link_ids.add(link.id)
        for endpoint in ("source", "target"):
            ref = getattr(link, endpoint)
            if ref not in actions_by_id:
                err("E001", f"/links/{i}/{endpoint}", f"link {endpoint} {ref!r} is not defined")
        target = actions_by_id.get(link.target)
        if isinstance(target, PlayerActionDef):
            err("E002", f"/links/{i}/target",
                f"player action {link.target!r} cannot be triggered by the graph")
        if link.delay < 0:
            err("E005", f"/links/{i}/delay", "delay must be >= 0")
        elif link.delay > delay_horizon:
            warn("W003", f"/links/{i}/delay",
                 f"delay {link.delay} exceeds the {delay_horizon}-tick horizon")
        source = actions_by_id.get(link.source)
        if (link.source == link.target and source is not None
                and s.effective_cooldown(source) == 0):
            warn("W004", f"/links/{i}",
                 "self-loop with cooldown 0 re-fires every tick (the engine clamps the "
                 "effective cooldown to a minimum of 1 tick to keep it bounded)")

    for kind, entities in (("agents", s.agents), ("prototypes", s.prototypes)):
        for i, agent in enumerate(entities):
            for ref in sorted(agent.assigned):
                action = actions_by_id.get(ref)
                if action is None:
                    err("E001", f"/{kind}/{i}/assigned", f"assigned action {ref!r} is not defined")
                elif isinstance(action, PlayerActionDef):
                    err("E010", f"/{kind}/{i}/assigned",
                        f"player action {ref!r} cannot be assigned to an agent")

    bindings_seen: dict[tuple, str] = {}
    for i, action in enumerate(s.actions):
        if isinstance(action, PlayerActionDef):
            if action.range < 0:
                err("E005", f"/actions/{i}/range", "range must be >= 0")
            if action.cooldown is not None and action.cooldown < 0:
                err("E005", f"/actions/{i}/cooldown", "cooldown must be >= 0")
            b = action.binding
            if b.method == "language" and b.mode == "intent" and b.category not in s.intent_lexicon:
                err("E007", f"/actions/{i}/binding/category",
                    f"intent category {b.category!r} is not in the intent lexicon")
            if b.distance is not None and b.distance < 0:
                err("E005", f"/actions/{i}/binding/distance", "activation distance must be >= 0")
            key = b.identity()
            if key in bindings_seen:
                err("E006", f"/actions/{i}/binding",
                    f"binding duplicates player action {bindings_seen[key]!r}")
            else:
                bindings_seen[key] = action.id
        else:
            if action.impact_radius < 0:
                err("E005", f"/actions/{i}/impact_radius", "impact_radius must be >= 0")
            if action.cooldown is not None and action.cooldown < 0:
                err("E005", f"/actions/{i}/cooldown", "cooldown must be >= 0")
            for j, cmd in enumerate(action.commands):
                _check_command_params(cmd, f"/actions/{i}/commands/{j}", s, out)

    if s.config.tick_ms <= 0:
        err("E005", "/config/tick_ms", "tick_ms must be > 0")
    if s.config.max_agents <= 0:
        err("E005", "/config/max_agents", "max_agents must be > 0")
    elif s.config.max_agents < len(s.agents):
        err("E009", "/config/max_agents",
            f"max_agents {s.config.max_agents} is below the scenario's {len(s.agents)} agents")
    if s.config.default_cooldown < 0:
        err("E005", "/config/default_cooldown", "default_cooldown must be >= 0")

    assigned_anywhere = {ref for ag in (*s.agents, *s.prototypes) for ref in ag.assigned}
    for i, action in enumerate(s.actions):
        if isinstance(action, ActionTemplate) and action.id not in assigned_anywhere:
            warn("W001", f"/actions/{i}", f"action {action.id!r} is never assigned to any agent")

    if not any(d.severity == "error" for d in out):
        from .analysis import reachable_actions

        reachable = reachable_actions(s)
        for i, action in enumerate(s.actions):
            if action.id not in reachable:
                warn("W002", f"/actions/{i}",
                     f"action {action.id!r} is unreachable from any player or auto-start action")

    out.sort(key=lambda d: (0 if d.severity == "error" else 1, d.code, d.location, d.message))
    return out


# ---------------------------------------------------------------------------
# serialization


def _command_obj(cmd: Command) -> dict:
    return {
        "kind": cmd.kind,
        "category": cmd.category,
        "params": cmd.params,
        "duration": cmd.duration,
        **cmd.extras,
    }


def _binding_obj(b: InputBinding) -> dict:
    out: dict[str, Any] = {"method": b.method, **b.extras}
    if b.method == "device":
        out["symbol"] = b.symbol
    elif b.method == "language":
        out["mode"] = b.mode
        if b.mode == "intent":
            out["category"] = b.category
    else:
        out["gesture"] = b.gesture
        if b.target is not None:
            out["target"] = b.target
        if b.distance is not None:
            out["distance"] = float(b.distance)
    return out


def _action_obj(action: AnyAction) -> dict:
    if isinstance(action, PlayerActionDef):
        out: dict[str, Any] = {
            "id": action.id,
            "kind": "player",
            "binding": _binding_obj(action.binding),
            "range": float(action.range),
            **action.extras,
        }
        if action.cooldown is not None:
            out["cooldown"] = action.cooldown
        return out
    out = {
        "id": action.id,
        "kind": "agent",
        "label": action.label,
        "commands": [_command_obj(c) for c in action.commands],
        "impact_radius": float(action.impact_radius),
        "interruptible": action.interruptible,
        "auto_start": action.auto_start,
        **action.extras,
    }
    if action.cooldown is not None:
        out["cooldown"] = action.cooldown
    return out


def _agent_obj(agent: Agent) -> dict:
    return {
        "id": agent.id,
        "prototype": agent.prototype,
        "position": agent.position.as_list(),
        "assigned": sorted(agent.assigned),
        "frozen": agent.frozen,
        "attributes": agent.attributes,
        "active": agent.active,
        **agent.extras,
    }


def scenario_to_obj(s: Scenario) -> dict:
    return {
        "version": s.version,
        "config": {
            "tick_ms": s.config.tick_ms,
            "max_agents": s.config.max_agents,
            "default_cooldown": s.config.default_cooldown,
            "rng_seed": s.config.rng_seed,
            **s.config.extras,
        },
        "agents": [_agent_obj(a) for a in sorted(s.agents, key=lambda a: a.id)],
        "prototypes": [_agent_obj(a) for a in sorted(s.prototypes, key=lambda a: a.id)],
        "actions": [_action_obj(a) for a in sorted(s.actions, key=lambda a: a.id)],
        "links": [
            {"id": l.id, "source": l.source, "target": l.target, "delay": l.delay, **l.extras}
            for l in sorted(s.links, key=lambda l: l.id)
        ],
        "intent_lexicon": {cat: list(s.intent_lexicon[cat]) for cat in sorted(s.intent_lexicon)},
        **s.extras,
    }


def serialize_scenario(s: Scenario) -> str:
    """Canonical document text: sorted keys, id-ordered lists, shortest
    round-trip numbers, two-space indent, trailing newline."""
    return json.dumps(scenario_to_obj(s), ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def scenario_hash(s: Scenario) -> str:
    """Content hash of the canonical serialization (hex sha256)."""
    return hashlib.sha256(serialize_scenario(s).encode("utf-8")).hexdigest()
