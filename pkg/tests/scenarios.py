"""Scenario builders shared across the test suite.

Each builder returns a fresh Scenario; expected values asserted against them
elsewhere are derived by hand or from the independent oracles, never from
engine output.
"""

from __future__ import annotations

from causaldeck.model import (
    ActionTemplate,
    Agent,
    CausalLink,
    Command,
    InputBinding,
    PlayerActionDef,
    Position,
    Scenario,
    SimConfig,
)


def minimal() -> Scenario:
    return Scenario(version="1.0")


def fire_cascade(spacing: float = 1.5, tree_count: int = 5) -> Scenario:
    """Campfire 'start a fire' (radius 1) ignites a line of trees that spread
    'burn' (radius 2) tree to tree; the chain starts with a player touch."""
    trees = [
        Agent(id=f"tree_{i}", position=Position(0.8 + spacing * (i - 1), 0.0, 0.0),
              assigned={"burn"})
        for i in range(1, tree_count + 1)
    ]
    campfire = Agent(id="campfire", position=Position(0.0, 0.0, 0.0),
                     assigned={"start-a-fire"})
    return Scenario(
        version="1.0",
        config=SimConfig(rng_seed=1),
        agents=[campfire, *trees],
        actions=[
            PlayerActionDef(
                id="touch",
                binding=InputBinding(method="gesture", gesture="touch",
                                     target="campfire", distance=1.5),
                range=1.5, cooldown=10,
            ),
            ActionTemplate(
                id="start-a-fire", label="start a fire",
                commands=[Command(kind="vfx-play", params={"name": "fire"}, duration=2)],
                impact_radius=1.0, cooldown=10,
            ),
            ActionTemplate(
                id="burn", label="burn",
                commands=[Command(kind="color-change", params={"color": "charred"}, duration=1)],
                impact_radius=2.0, cooldown=10,
            ),
        ],
        links=[
            CausalLink(id="l1", source="touch", target="start-a-fire"),
            CausalLink(id="l2", source="start-a-fire", target="burn"),
            CausalLink(id="l3", source="burn", target="burn"),
        ],
    )


def look_gate(range_: float = 5.0) -> Scenario:
    """A look-at player action gated at an exact activation distance."""
    return Scenario(
        version="1.0",
        agents=[Agent(id="campfire", position=Position(0.0, 0.0, 0.0), assigned={"glow"})],
        actions=[
            PlayerActionDef(
                id="Look",
                binding=InputBinding(method="gesture", gesture="look-at",
                                     target="campfire", distance=range_),
                range=range_, cooldown=10,
            ),
            ActionTemplate(
                id="glow",
                commands=[Command(kind="color-change", params={"color": "amber"})],
                impact_radius=1.0,
            ),
        ],
        links=[CausalLink(id="l1", source="Look", target="glow")],
    )


def fan_out() -> Scenario:
    """One player action triggering three different agent actions."""
    agents = [
        Agent(id="dancer", position=Position(1.0, 0.0, 0.0), assigned={"dance"}),
        Agent(id="singer", position=Position(0.0, 1.0, 0.0), assigned={"sing"}),
        Agent(id="lamp", position=Position(0.0, 0.0, 1.0), assigned={"flash"}),
    ]
    actions = [
        PlayerActionDef(id="press", binding=InputBinding(method="device", symbol="X"),
                        range=10.0, cooldown=10),
        ActionTemplate(id="dance", commands=[Command(kind="play-clip", params={"clip": "dance"},
                                                     duration=3)], impact_radius=1.0),
        ActionTemplate(id="sing", commands=[Command(kind="play-sound", params={"clip": "la"})],
                       impact_radius=1.0),
        ActionTemplate(id="flash", commands=[Command(kind="vfx-play", params={"name": "flash"},
                                                     duration=2)], impact_radius=1.0),
    ]
    links = [
        CausalLink(id="la", source="press", target="dance"),
        CausalLink(id="lb", source="press", target="sing"),
        CausalLink(id="lc", source="press", target="flash"),
    ]
    return Scenario(version="1.0", agents=agents, actions=actions, links=links)


def fan_in() -> Scenario:
    """Two auto-start sources racing to trigger the same action on one tree;
    the lower source agent id wins, the other is absorbed by the guard."""
    agents = [
        Agent(id="src_a", position=Position(-1.0, 0.0, 0.0), assigned={"alpha"}),
        Agent(id="src_b", position=Position(1.0, 0.0, 0.0), assigned={"beta"}),
        Agent(id="tree", position=Position(0.0, 0.0, 0.0), assigned={"burn"}),
    ]
    actions = [
        ActionTemplate(id="alpha", commands=[Command(kind="standby", duration=2)],
                       impact_radius=2.0, auto_start=True),
        ActionTemplate(id="beta", commands=[Command(kind="standby", duration=2)],
                       impact_radius=2.0, auto_start=True),
        ActionTemplate(id="burn", commands=[Command(kind="color-change",
                                                    params={"color": "charred"}, duration=2)],
                       impact_radius=2.0),
    ]
    links = [
        CausalLink(id="l_alpha", source="alpha", target="burn"),
        CausalLink(id="l_beta", source="beta", target="burn"),
    ]
    return Scenario(version="1.0", agents=agents, actions=actions, links=links)


def chain4() -> Scenario:
    """Player-rooted chain of four agent actions along a line."""
    agents = [
        Agent(id=f"a{i}", position=Position(float(i), 0.0, 0.0), assigned={f"act{i}"})
        for i in range(1, 5)
    ]
    actions: list = [
        PlayerActionDef(id="start", binding=InputBinding(method="device", symbol="S"),
                        range=10.0, cooldown=10),
    ]
    links = [CausalLink(id="l0", source="start", target="act1")]
    for i in range(1, 5):
        actions.append(ActionTemplate(
            id=f"act{i}", commands=[Command(kind="standby", duration=2)], impact_radius=2.0))
        if i < 4:
            links.append(CausalLink(id=f"l{i}", source=f"act{i}", target=f"act{i+1}"))
    return Scenario(version="1.0", agents=agents, actions=actions, links=links)


def feedback_loop(cooldown: int = 10, duration: int = 12) -> Scenario:
    """Two-node feedback loop ping <-> pong kept alive by long standbys."""
    agents = [
        Agent(id="a1", position=Position(0.0, 0.0, 0.0), assigned={"ping"}),
        Agent(id="a2", position=Position(1.0, 0.0, 0.0), assigned={"pong"}),
    ]
    actions = [
        ActionTemplate(id="ping", commands=[Command(kind="standby", duration=duration)],
                       impact_radius=2.0, cooldown=cooldown, auto_start=True),
        ActionTemplate(id="pong", commands=[Command(kind="standby", duration=duration)],
                       impact_radius=2.0, cooldown=cooldown),
    ]
    links = [
        CausalLink(id="lab", source="ping", target="pong"),
        CausalLink(id="lba", source="pong", target="ping"),
    ]
    return Scenario(version="1.0", agents=agents, actions=actions, links=links)


def self_spread(spacing: float = 1.5, tree_count: int = 5, cooldown: int = 10) -> Scenario:
    """A line of trees sharing one self-linked 'burn'; an auto-start igniter
    on tree_1 seeds the spread (seed activation at tick 1)."""
    trees = [
        Agent(id=f"tree_{i}", position=Position(spacing * (i - 1), 0.0, 0.0),
              assigned={"burn"} | ({"ignite"} if i == 1 else set()))
        for i in range(1, tree_count + 1)
    ]
    actions = [
        ActionTemplate(id="ignite", commands=[Command(kind="vfx-play", params={"name": "spark"},
                                                      duration=1)],
                       impact_radius=0.0, auto_start=True),
        ActionTemplate(id="burn",
                       commands=[Command(kind="color-change", params={"color": "charred"},
                                         duration=1)],
                       impact_radius=2.0, cooldown=cooldown),
    ]
    links = [
        CausalLink(id="l_seed", source="ignite", target="burn"),
        CausalLink(id="l_spread", source="burn", target="burn"),
    ]
    return Scenario(version="1.0", agents=trees, actions=actions, links=links)


def virus(max_agents: int = 8) -> Scenario:
    """Approach-triggered duplication: every virus in range spawns a clone,
    doubling the population per approach until the spawn cap."""
    proto = Agent(id="virus", position=Position(0.0, 0.0, 0.0), assigned={"duplicate"})
    seed = Agent(id="virus-0", position=Position(0.0, 0.0, 0.0), prototype="virus",
                 assigned={"duplicate"})
    return Scenario(
        version="1.0",
        config=SimConfig(max_agents=max_agents, rng_seed=7),
        agents=[seed],
        prototypes=[proto],
        actions=[
            PlayerActionDef(id="approach",
                            binding=InputBinding(method="gesture", gesture="approach"),
                            range=100.0, cooldown=1),
            ActionTemplate(
                id="duplicate",
                commands=[Command(kind="spawn",
                                  params={"prototype": "virus", "offset": [0.3, 0.0, 0.0]})],
                impact_radius=0.0, cooldown=1,
            ),
        ],
        links=[CausalLink(id="l_dup", source="approach", target="duplicate")],
    )


def talkative(canned: bool = True) -> Scenario:
    """A greeter whose reply is produced by the pluggable text generator."""
    prompt = "p1" if canned else "Greetings, I am {name}"
    return Scenario(
        version="1.0",
        agents=[Agent(id="bard", position=Position(1.0, 0.0, 0.0),
                      attributes={"name": "Ada"}, assigned={"greet"})],
        actions=[
            PlayerActionDef(id="hail",
                            binding=InputBinding(method="language", mode="intent",
                                                 category="greetings"),
                            range=5.0, cooldown=10),
            ActionTemplate(id="greet",
                           commands=[Command(kind="speak-generated", params={"prompt": prompt})],
                           impact_radius=1.0),
        ],
        links=[CausalLink(id="l_greet", source="hail", target="greet")],
        intent_lexicon={"greetings": ["hello", "hi", "howdy"]},
    )


def chain_medley() -> Scenario:
    """Five disjoint chains of lengths 4, 5, 5, 6, 7 (hand-picked so the
    summary is M=5, MAD=1, max=7)."""
    actions: list = []
    links: list = []
    agents: list = []
    for chain_idx, length in enumerate((4, 5, 5, 6, 7), start=1):
        ids = [f"c{chain_idx}_{j}" for j in range(1, length + 1)]
        for aid in ids:
            actions.append(ActionTemplate(
                id=aid, commands=[Command(kind="standby", duration=1)], impact_radius=1.0))
        for a, b in zip(ids, ids[1:]):
            links.append(CausalLink(id=f"l_{a}_{b}", source=a, target=b))
        agents.append(Agent(id=f"holder{chain_idx}", position=Position(0.0, 0.0, 0.0),
                            assigned=set(ids)))
    return Scenario(version="1.0", agents=agents, actions=actions, links=links)
