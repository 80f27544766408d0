"""Core domain model: positions, commands, action templates, causal links,
agents, and whole scenarios.

Plain data shared by the file format, the engine, and the analysis suite.
Loaded scenarios are treated as read-only; the engine clones agents into its
own mutable world. The one sanctioned exception is template tuning: action
templates are shared objects, so editing a template's parameters (radius,
cooldown, commands) changes behavior for every agent it is assigned to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

# Reserved owner id for the player pseudo-entity; agents may not use it.
PLAYER_OWNER = "player"

# Command verbs grouped by category. Kinds are globally unique, so the
# category of a command is derivable from its kind.
COMMAND_KINDS: dict[str, tuple[str, ...]] = {
    "spatial": ("move-to", "follow", "rotate", "scale"),
    "visual": ("color-change", "vfx-play", "vfx-stop", "material-change", "appear", "disappear"),
    "temporal": ("standby", "instant-trigger", "delayed-trigger", "freeze", "defrost"),
    "language-sound": ("play-sound", "speak-text", "speak-generated"),
    "animation": ("play-clip", "stop-clip", "state-change"),
    "instance": ("spawn", "activate-agent", "deactivate-agent"),
    "utility": ("set-attribute", "custom-hook"),
}

CATEGORY_BY_KIND: dict[str, str] = {
    kind: category for category, kinds in COMMAND_KINDS.items() for kind in kinds
}

INPUT_METHODS = ("device", "language", "gesture")
LANGUAGE_MODES = ("intent", "prompt")
GESTURE_KINDS = ("look-at", "touch", "approach", "pick-up", "wave", "walk-to")

Scalar = str | int | float | bool


class ModelError(Exception):
    """Base class for domain lookup and shape errors."""


class UnknownAction(ModelError):
    pass


class UnknownAgent(ModelError):
    pass


class KindMismatch(ModelError):
    """A player action was used where an agent action is required (or vice versa)."""


@dataclass(frozen=True)
class Position:
    """A point in scene units. Components must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y, self.z):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ValueError(f"non-finite position component: {v!r}")

    def offset(self, dx: float, dy: float, dz: float) -> Position:
        return Position(self.x + dx, self.y + dy, self.z + dz)

    def as_list(self) -> list[float]:
        return [float(self.x), float(self.y), float(self.z)]


def distance_between(a: Position, b: Position) -> float:
    """Euclidean distance; decides whether a trigger reaches a target."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


@dataclass
class Command:
    """One verb in an action's command stack.

    ``duration`` is in ticks; 0 means the command completes instantly on the
    tick it is reached. move-to ignores the field and derives its duration
    from speed and distance at runtime.
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    duration: int = 0
    category: str = ""
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in CATEGORY_BY_KIND:
            raise ValueError(f"unknown command kind: {self.kind!r}")
        derived = CATEGORY_BY_KIND[self.kind]
        if not self.category:
            self.category = derived
        elif self.category != derived:
            raise ValueError(f"command kind {self.kind!r} is not in category {self.category!r}")


@dataclass
class InputBinding:
    """How a player action is recognized from raw input.

    method "device" uses ``symbol``; "language" uses ``mode`` ("intent" with a
    ``category`` from the scenario's intent lexicon, or "prompt" for
    passthrough); "gesture" uses ``gesture`` plus optional ``target`` agent
    and ``distance`` gate.
    """

    method: str
    symbol: str | None = None
    mode: str | None = None
    category: str | None = None
    gesture: str | None = None
    target: str | None = None
    distance: float | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    def identity(self) -> tuple:
        """Equality key used to reject duplicate bindings at validation."""
        return (self.method, self.symbol, self.mode, self.category,
                self.gesture, self.target, self.distance)


@dataclass
class ActionTemplate:
    """Reusable agent action: an ordered command stack plus trigger geometry.

    ``cooldown`` of None means "use the scenario's default_cooldown".
    """

    id: str
    commands: list[Command]
    impact_radius: float = 0.0
    cooldown: int | None = None
    interruptible: bool = False
    auto_start: bool = False
    label: str = ""
    extras: dict[str, Any] = field(default_factory=dict)

    kind = "agent"


@dataclass
class PlayerActionDef:
    """Player action: an input binding plus the player's trigger effect radius."""

    id: str
    binding: InputBinding
    range: float = 0.0
    cooldown: int | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    kind = "player"


AnyAction = ActionTemplate | PlayerActionDef


@dataclass
class CausalLink:
    """Directed trigger edge; the target must be an agent action.

    ``delay`` is added on top of the engine's one-tick activation latency.
    """

    id: str
    source: str
    target: str
    delay: int = 0
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass
class Agent:
    """Positioned entity carrying assigned action templates and runtime flags."""

    id: str
    position: Position
    prototype: str = ""
    assigned: set[str] = field(default_factory=set)
    frozen: bool = False
    attributes: dict[str, Scalar] = field(default_factory=dict)
    active: bool = True
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass
class SimConfig:
    tick_ms: int = 100
    max_agents: int = 10000
    default_cooldown: int = 10
    rng_seed: int = 0
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass
class Scenario:
    """The complete authored artifact."""

    version: str = "1.0"
    config: SimConfig = field(default_factory=SimConfig)
    agents: list[Agent] = field(default_factory=list)
    prototypes: list[Agent] = field(default_factory=list)
    actions: list[AnyAction] = field(default_factory=list)
    links: list[CausalLink] = field(default_factory=list)
    intent_lexicon: dict[str, list[str]] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # Entity order carries no meaning; keep everything in id order so
        # structural equality and canonical serialization agree.
        self.agents.sort(key=lambda a: a.id)
        self.prototypes.sort(key=lambda a: a.id)
        self.actions.sort(key=lambda a: a.id)
        self.links.sort(key=lambda l: l.id)

    def find_action(self, action_id: str) -> AnyAction | None:
        for a in self.actions:
            if a.id == action_id:
                return a
        return None

    def find_agent(self, agent_id: str) -> Agent | None:
        for a in self.agents:
            if a.id == agent_id:
                return a
        return None

    def find_prototype(self, proto_id: str) -> Agent | None:
        for p in self.prototypes:
            if p.id == proto_id:
                return p
        return None

    def templates(self) -> list[ActionTemplate]:
        return [a for a in self.actions if isinstance(a, ActionTemplate)]

    def player_actions(self) -> list[PlayerActionDef]:
        return [a for a in self.actions if isinstance(a, PlayerActionDef)]

    def links_from(self, action_id: str) -> list[CausalLink]:
        return sorted((l for l in self.links if l.source == action_id), key=lambda l: l.id)

    def effective_cooldown(self, action: AnyAction) -> int:
        return self.config.default_cooldown if action.cooldown is None else action.cooldown


def assign_action(scenario: Scenario, agent: Agent, action_id: str) -> Agent:
    """Attach an agent action template to an agent. Idempotent.

    Raises UnknownAction if the id is undefined and KindMismatch if it names
    a player action (player actions cannot be assigned to agents).
    """
    action = scenario.find_action(action_id)
    if action is None:
        raise UnknownAction(f"action {action_id!r} is not defined in the scenario")
    if isinstance(action, PlayerActionDef):
        raise KindMismatch(f"player action {action_id!r} cannot be assigned to an agent")
    agent.assigned.add(action_id)
    return agent
