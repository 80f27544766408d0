"""Seeded random scenario-document generator for format/validator fuzzing.

Documents are always structurally valid JSON trees of the right shape, but
referential integrity, value ranges, and bindings are randomized, so a share
of them carry error diagnostics. The validator-soundness property is: any
fuzzed scenario that validates with zero errors must load into the engine.
"""

from __future__ import annotations

import random

_COMMAND_POOL = (
    ("standby", lambda rng: ({}, rng.randint(1, 5))),
    ("color-change", lambda rng: ({"color": rng.choice(["red", "blue", "ash"])}, 0)),
    ("vfx-play", lambda rng: ({"name": "sparkle"}, rng.randint(0, 3))),
    ("speak-text", lambda rng: ({"text": "ahoy"}, 0)),
    ("play-sound", lambda rng: ({"clip": "chime"}, 0)),
    ("set-attribute", lambda rng: ({"name": "mood", "value": rng.randint(0, 9)}, 0)),
    ("move-to", lambda rng: ({"target": [rng.uniform(-5, 5), 0.0, rng.uniform(-5, 5)],
                              "speed": rng.choice([0.5, 1.0, 2.0, -1.0])}, 0)),
    ("spawn", lambda rng: ({"prototype": rng.choice(["proto", "ghost"])}, 0)),
    ("instant-trigger", lambda rng: ({}, 0)),
    ("freeze", lambda rng: ({"target": "radius", "radius": rng.choice([1.0, 2.5, -1.0])}, 0)),
)


def fuzz_doc(rng: random.Random) -> dict:
    action_ids = [f"act{i}" for i in range(rng.randint(0, 5))]
    player_ids = [f"pl{i}" for i in range(rng.randint(0, 2))]
    id_pool = action_ids + player_ids + ["ghost-action"]

    actions = []
    for aid in action_ids:
        commands = []
        for _ in range(rng.randint(1, 3)):
            kind, gen = rng.choice(_COMMAND_POOL)
            params, duration = gen(rng)
            commands.append({"kind": kind, "params": params, "duration": duration})
        action = {
            "id": aid,
            "kind": "agent",
            "commands": commands,
            "impact_radius": rng.choice([0.0, 1.0, 2.5, 4.0, -1.0]),
            "auto_start": rng.random() < 0.2,
        }
        if rng.random() < 0.5:
            action["cooldown"] = rng.choice([0, 1, 10, -5])
        if rng.random() < 0.2:
            action["x-note"] = "fuzzed"
        actions.append(action)
    for pid in player_ids:
        binding = rng.choice([
            {"method": "device", "symbol": rng.choice(["X", "Y"])},
            {"method": "language", "mode": "prompt"},
            {"method": "language", "mode": "intent",
             "category": rng.choice(["greetings", "nonsense"])},
            {"method": "gesture", "gesture": rng.choice(["touch", "approach", "look-at"]),
             "distance": rng.choice([1.0, 5.0])},
        ])
        actions.append({
            "id": pid,
            "kind": "player",
            "binding": binding,
            "range": rng.choice([0.0, 2.0, 5.0]),
        })

    agents = []
    for i in range(rng.randint(0, 6)):
        assigned = [aid for aid in id_pool if rng.random() < 0.3]
        agents.append({
            "id": rng.choice([f"agent{i}", f"agent{i}", "player"]),
            "position": [rng.uniform(-10, 10), 0.0, rng.uniform(-10, 10)],
            "assigned": assigned,
            "frozen": rng.random() < 0.1,
            "attributes": {"hue": rng.randint(0, 255)} if rng.random() < 0.4 else {},
        })

    links = []
    for i in range(rng.randint(0, 6)):
        links.append({
            "id": f"link{i}",
            "source": rng.choice(id_pool),
            "target": rng.choice(id_pool),
            "delay": rng.choice([0, 0, 1, 5, 2000, -1]),
        })

    doc = {
        "version": "1.0",
        "config": {
            "tick_ms": rng.choice([100, 50, 100]),
            "max_agents": rng.choice([2, 100, 10000]),
            "default_cooldown": rng.choice([0, 5, 10]),
            "rng_seed": rng.randint(0, 2**32),
        },
        "agents": agents,
        "prototypes": [{
            "id": "proto",
            "position": [0.0, 0.0, 0.0],
            "assigned": [aid for aid in action_ids if rng.random() < 0.3],
        }] if rng.random() < 0.7 else [],
        "actions": actions,
        "links": links,
        "intent_lexicon": {"greetings": ["hello", "hi"]} if rng.random() < 0.6 else {},
    }
    if rng.random() < 0.2:
        doc["x-editor"] = {"zoom": rng.random()}
    return doc
