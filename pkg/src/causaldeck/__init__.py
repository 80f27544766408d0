"""causaldeck: a deterministic trigger-action narrative engine.

Player and agent actions are linked by causal edges gated by spherical impact
radii and per-target cooldown timers; a discrete-tick engine executes them
into a replayable event log. Ships with a scenario file format, an analysis
suite, a session service, and a CLI.
"""

from .model import (
    Agent,
    ActionTemplate,
    CausalLink,
    Command,
    InputBinding,
    PlayerActionDef,
    Position,
    Scenario,
    SimConfig,
    assign_action,
    distance_between,
)
from .format import (
    Diagnostic,
    FormatError,
    parse_scenario,
    serialize_scenario,
    scenario_hash,
    validate_scenario,
)
from .engine import EventLog, InvalidScenario, SimState, init_session, run_trace
from .inputs import RawInputEvent, classify_intent, match_bindings

__version__ = "0.1.0"

__all__ = [
    "Agent", "ActionTemplate", "CausalLink", "Command", "InputBinding",
    "PlayerActionDef", "Position", "Scenario", "SimConfig",
    "assign_action", "distance_between",
    "Diagnostic", "FormatError", "parse_scenario", "serialize_scenario",
    "scenario_hash", "validate_scenario",
    "EventLog", "InvalidScenario", "SimState", "init_session", "run_trace",
    "RawInputEvent", "classify_intent", "match_bindings",
    "__version__",
]
