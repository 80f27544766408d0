from __future__ import annotations

import json
import random

import pytest

import scenarios
from fuzz import fuzz_doc
from causaldeck.engine import init_session
from causaldeck.format import (
    Diagnostic,
    DocumentSyntaxError,
    SchemaError,
    VersionError,
    parse_scenario,
    scenario_to_obj,
    serialize_scenario,
    validate_scenario,
)
from causaldeck.model import ActionTemplate, PlayerActionDef, UnknownAction

ALL_BUILDERS = (
    scenarios.minimal, scenarios.fire_cascade, scenarios.look_gate, scenarios.fan_out,
    scenarios.fan_in, scenarios.chain4, scenarios.feedback_loop, scenarios.self_spread,
    scenarios.virus, scenarios.talkative, scenarios.chain_medley,
)


def codes(diags: list[Diagnostic]) -> list[str]:
    return [d.code for d in diags]


# ---------------------------------------------------------------------------
# parsing


def test_minimal_document_parses_empty():
    doc = '{"version": "1.0"}'
    s = parse_scenario(doc)
    assert s.agents == [] and s.actions == [] and s.links == []
    assert validate_scenario(s) == []


def test_minimal_canonical_fixed_point(minimal):
    text = serialize_scenario(minimal)
    assert serialize_scenario(parse_scenario(text)) == text


def test_cascade_fixture_shape(cascade):
    s = parse_scenario(serialize_scenario(cascade))
    assert len([a for a in s.actions if isinstance(a, ActionTemplate)]) == 2
    assert len([a for a in s.actions if isinstance(a, PlayerActionDef)]) == 1
    assert len(s.links) == 3
    assert s.find_action("start-a-fire").impact_radius == 1.0
    assert s.find_action("burn").impact_radius == 2.0


def test_syntax_error_carries_position():
    with pytest.raises(DocumentSyntaxError) as exc:
        parse_scenario('{"version": "1.0",\n  "agents": [}')
    assert exc.value.line == 2


def test_non_finite_rejected():
    with pytest.raises(DocumentSyntaxError):
        parse_scenario('{"version": "1.0", "agents": [{"id": "a", "position": [Infinity, 0, 0]}]}')


def test_missing_version_is_schema_error():
    with pytest.raises(SchemaError):
        parse_scenario("{}")


def test_future_major_version_rejected():
    with pytest.raises(VersionError):
        parse_scenario('{"version": "2.0"}')
    parse_scenario('{"version": "1.7"}')  # future minor within major 1 is fine


def test_unknown_field_is_schema_error():
    with pytest.raises(SchemaError) as exc:
        parse_scenario('{"version": "1.0", "agnets": []}')
    assert "agnets" in str(exc.value)


def test_unknown_command_kind_rejected():
    doc = {"version": "1.0", "actions": [
        {"id": "a", "kind": "agent", "commands": [{"kind": "explode"}]}]}
    with pytest.raises(SchemaError):
        parse_scenario(json.dumps(doc))


def test_command_category_mismatch_rejected():
    doc = {"version": "1.0", "actions": [
        {"id": "a", "kind": "agent",
         "commands": [{"kind": "move-to", "category": "visual"}]}]}
    with pytest.raises(SchemaError):
        parse_scenario(json.dumps(doc))


def test_x_fields_preserved_verbatim():
    doc = {
        "version": "1.0",
        "x-editor-coords": {"touch": [120, 40]},
        "agents": [{"id": "a", "position": [0, 0, 0], "x-pinned": True}],
    }
    s = parse_scenario(json.dumps(doc))
    assert s.extras["x-editor-coords"] == {"touch": [120, 40]}
    assert s.agents[0].extras["x-pinned"] is True
    again = parse_scenario(serialize_scenario(s))
    assert again.extras["x-editor-coords"] == {"touch": [120, 40]}
    assert again.agents[0].extras["x-pinned"] is True


# ---------------------------------------------------------------------------
# validation diagnostics


def _doc_with(**overrides) -> str:
    doc = {"version": "1.0", "agents": [], "actions": [], "links": []}
    doc.update(overrides)
    return json.dumps(doc)


BURN = {"id": "burn", "kind": "agent", "impact_radius": 2.0,
        "commands": [{"kind": "color-change", "params": {"color": "ash"}}]}
LOOK = {"id": "Look", "kind": "player", "range": 5.0,
        "binding": {"method": "gesture", "gesture": "look-at", "distance": 5.0}}
TREE = {"id": "tree", "position": [0, 0, 0], "assigned": ["burn"]}


def test_dangling_link_is_e001():
    s = parse_scenario(_doc_with(
        agents=[TREE], actions=[BURN, LOOK],
        links=[{"id": "l1", "source": "Look", "target": "missing"}]))
    diags = validate_scenario(s)
    assert "E001" in codes(diags)
    assert all(d.location.startswith("/links/0") for d in diags if d.code == "E001")


def test_player_link_target_is_e002():
    s = parse_scenario(_doc_with(
        agents=[TREE], actions=[BURN, LOOK],
        links=[{"id": "l1", "source": "burn", "target": "Look"}]))
    assert "E002" in codes(validate_scenario(s))


def test_duplicate_ids_are_e003():
    s = parse_scenario(_doc_with(actions=[BURN, dict(BURN)]))
    assert "E003" in codes(validate_scenario(s))
    s = parse_scenario(_doc_with(agents=[TREE, dict(TREE)], actions=[BURN]))
    assert "E003" in codes(validate_scenario(s))


def test_spawn_unknown_prototype_is_e004():
    spawner = {"id": "dup", "kind": "agent",
               "commands": [{"kind": "spawn", "params": {"prototype": "ghost"}}]}
    s = parse_scenario(_doc_with(actions=[spawner]))
    assert "E004" in codes(validate_scenario(s))


def test_negative_radius_and_cooldown_are_e005():
    bad = dict(BURN, impact_radius=-1.0, cooldown=-2)
    s = parse_scenario(_doc_with(actions=[bad]))
    found = [d for d in validate_scenario(s) if d.code == "E005"]
    assert len(found) == 2


def test_duplicate_binding_is_e006():
    other = dict(LOOK, id="Look2")
    s = parse_scenario(_doc_with(actions=[LOOK, other]))
    assert "E006" in codes(validate_scenario(s))


def test_unknown_intent_category_is_e007():
    hail = {"id": "hail", "kind": "player",
            "binding": {"method": "language", "mode": "intent", "category": "greetings"}}
    s = parse_scenario(_doc_with(actions=[hail]))
    assert "E007" in codes(validate_scenario(s))


def test_reserved_agent_id_is_e008():
    s = parse_scenario(_doc_with(agents=[{"id": "player", "position": [0, 0, 0]}]))
    assert "E008" in codes(validate_scenario(s))


def test_agent_cap_below_population_is_e009():
    agents = [{"id": f"a{i}", "position": [0, 0, 0]} for i in range(3)]
    s = parse_scenario(_doc_with(agents=agents, config={"max_agents": 2}))
    assert "E009" in codes(validate_scenario(s))


def test_player_action_assigned_is_e010():
    s = parse_scenario(_doc_with(
        agents=[{"id": "tree", "position": [0, 0, 0], "assigned": ["Look"]}],
        actions=[LOOK]))
    assert "E010" in codes(validate_scenario(s))


def test_unassigned_action_warns_w001():
    s = parse_scenario(_doc_with(actions=[BURN, LOOK],
                                 links=[{"id": "l1", "source": "Look", "target": "burn"}]))
    assert "W001" in codes(validate_scenario(s))


def test_unreachable_action_warns_w002():
    s = parse_scenario(_doc_with(agents=[TREE], actions=[BURN]))
    diags = validate_scenario(s)
    assert "W002" in codes(diags)
    assert all(d.severity == "warning" for d in diags)


def test_long_delay_warns_w003():
    s = parse_scenario(_doc_with(
        agents=[TREE], actions=[BURN, LOOK],
        links=[{"id": "l1", "source": "Look", "target": "burn", "delay": 5000}]))
    assert "W003" in codes(validate_scenario(s))
    assert "W003" not in codes(validate_scenario(s, delay_horizon=10000))


def test_zero_cooldown_self_loop_warns_w004():
    loop = dict(BURN, cooldown=0)
    s = parse_scenario(_doc_with(
        agents=[TREE], actions=[loop, LOOK],
        links=[{"id": "l0", "source": "Look", "target": "burn"},
               {"id": "l1", "source": "burn", "target": "burn"}]))
    w = [d for d in validate_scenario(s) if d.code == "W004"]
    assert len(w) == 1 and "1 tick" in w[0].message


def test_validation_never_raises_and_is_ordered():
    s = parse_scenario(_doc_with(
        agents=[{"id": "player", "position": [0, 0, 0], "assigned": ["nope"]}],
        actions=[dict(BURN, impact_radius=-3.0)],
        links=[{"id": "l1", "source": "x", "target": "y", "delay": -1}]))
    diags = validate_scenario(s)
    assert diags == sorted(
        diags, key=lambda d: (0 if d.severity == "error" else 1, d.code, d.location, d.message))


# ---------------------------------------------------------------------------
# round-trip properties


@pytest.mark.parametrize("builder", ALL_BUILDERS, ids=lambda b: b.__name__)
def test_round_trip_structural_equality(builder):
    s = builder()
    text = serialize_scenario(s)
    once = parse_scenario(text)
    twice = parse_scenario(serialize_scenario(once))
    assert once == twice == s


@pytest.mark.parametrize("builder", ALL_BUILDERS, ids=lambda b: b.__name__)
def test_canonical_idempotence(builder):
    text = serialize_scenario(builder())
    assert serialize_scenario(parse_scenario(text)) == text


def test_cascade_radii_survive_round_trip(cascade):
    s = parse_scenario(serialize_scenario(cascade))
    assert s.find_action("start-a-fire").impact_radius == 1.0
    assert s.find_action("burn").impact_radius == 2.0


def test_fuzzed_documents_round_trip_and_sound():
    rng = random.Random(20260810)
    for _ in range(300):
        text = json.dumps(fuzz_doc(rng))
        s = parse_scenario(text)
        canonical = serialize_scenario(s)
        assert parse_scenario(canonical) == s
        assert serialize_scenario(parse_scenario(canonical)) == canonical
        diags = validate_scenario(s)
        if not any(d.severity == "error" for d in diags):
            try:
                init_session(s, seed=0)
            except UnknownAction as exc:  # soundness: zero errors => engine loads
                raise AssertionError(f"validator passed but engine failed: {exc}") from exc


def test_scenario_to_obj_lists_in_id_order(cascade):
    obj = scenario_to_obj(cascade)
    assert [a["id"] for a in obj["actions"]] == sorted(a["id"] for a in obj["actions"])
    assert [l["id"] for l in obj["links"]] == sorted(l["id"] for l in obj["links"])
