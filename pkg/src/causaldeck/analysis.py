"""Static and dynamic analyses over scenarios.

Chain statistics, cycle detection, reachability, the proximity-spread oracle,
and the top-down spatial map. The spread oracle deliberately shares no code
with the engine's trigger resolution (it is the independent check for the
engine's spread behavior), down to doing its own squared-distance math.

"Chained relationship" is formalized on the condensation of the link graph:
cycles collapse to single nodes rather than being unrolled, and a chain is a
maximal condensation path from an in-degree-0 component to an out-degree-0
component, expanded back to actions (cycle members in id order). Chain length
counts actions. Cycles themselves are reported separately by ``find_cycles``.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from .model import (
    ActionTemplate,
    PlayerActionDef,
    Scenario,
    UnknownAction,
    UnknownAgent,
)

DEFAULT_MAX_CHAINS = 1_000_000


class AnalysisError(Exception):
    pass


# ---------------------------------------------------------------------------
# reachability


def reachable_actions(s: Scenario) -> set[str]:
    """Closure over links from all player actions and auto-start actions,
    ignoring spatial feasibility."""
    roots = {a.id for a in s.player_actions()}
    roots |= {a.id for a in s.templates() if a.auto_start}
    adj: dict[str, set[str]] = {}
    for link in s.links:
        adj.setdefault(link.source, set()).add(link.target)
    seen = set(roots)
    frontier = list(roots)
    while frontier:
        nxt = []
        for node in frontier:
            for succ in adj.get(node, ()):
                if succ not in seen:
                    seen.add(succ)
                    nxt.append(succ)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# chains


@dataclass
class ChainReport:
    chains: list[list[str]]
    lengths: list[int]
    count: int
    median: float
    mad: float
    max_length: int
    truncated: bool = False

    def to_doc(self) -> dict[str, Any]:
        return {
            "kind": "chains",
            "count": self.count,
            "median": self.median,
            "mad": self.mad,
            "max": self.max_length,
            "truncated": self.truncated,
            "chains": [{"actions": c, "length": l} for c, l in zip(self.chains, self.lengths)],
        }


def _tarjan_scc(nodes: list[str], adj: dict[str, list[str]]) -> list[list[str]]:
    """Iterative Tarjan; returns SCCs, each member list sorted."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adj.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                sccs.append(sorted(component))
    return sccs


def chain_stats(s: Scenario, max_chains: int = DEFAULT_MAX_CHAINS) -> ChainReport:
    """Enumerate maximal head-to-tail chains and summarize their lengths.

    Median and MAD (median of absolute deviations from the median, unscaled)
    use the standard definitions; an even count averages the middle two.
    """
    nodes = sorted({l.source for l in s.links} | {l.target for l in s.links})
    adj: dict[str, list[str]] = {}
    for link in s.links:
        adj.setdefault(link.source, []).append(link.target)
    for key in adj:
        adj[key] = sorted(set(adj[key]))

    sccs = _tarjan_scc(nodes, adj)
    scc_of = {node: i for i, scc in enumerate(sccs) for node in scc}
    cond_adj: dict[int, list[int]] = {i: [] for i in range(len(sccs))}
    cond_in: dict[int, int] = {i: 0 for i in range(len(sccs))}
    seen_edges: set[tuple[int, int]] = set()
    for link in s.links:
        a, b = scc_of[link.source], scc_of[link.target]
        if a != b and (a, b) not in seen_edges:
            seen_edges.add((a, b))
            cond_adj[a].append(b)
            cond_in[b] += 1
    for i in cond_adj:
        cond_adj[i].sort(key=lambda j: sccs[j][0])

    sources = sorted((i for i in range(len(sccs)) if cond_in[i] == 0),
                     key=lambda i: sccs[i][0])
    chains: list[list[str]] = []
    truncated = False
    for src in sources:
        stack: list[list[int]] = [[src]]
        while stack:
            path = stack.pop()
            succs = cond_adj[path[-1]]
            if not succs:
                if len(chains) >= max_chains:
                    truncated = True
                    break
                chains.append([node for i in path for node in sccs[i]])
                continue
            for nxt in reversed(succs):
                stack.append(path + [nxt])
        if truncated:
            break

    chains.sort()
    lengths = [len(c) for c in chains]
    return ChainReport(
        chains=chains,
        lengths=lengths,
        count=len(chains),
        median=float(statistics.median(lengths)) if lengths else 0.0,
        mad=(float(statistics.median([abs(l - statistics.median(lengths)) for l in lengths]))
             if lengths else 0.0),
        max_length=max(lengths) if lengths else 0,
        truncated=truncated,
    )


# ---------------------------------------------------------------------------
# cycles


def _node_cycles(nodes: list[str], adj: dict[str, list[str]]) -> list[list[str]]:
    """Elementary cycles as node sequences, each anchored at its smallest node.

    Johnson-style blocked search, run per start node over the subgraph of
    nodes not smaller than it, so every cycle is produced exactly once.
    Self-loops are handled separately by the caller.
    """
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    base = [[idx[w] for w in adj.get(v, ()) if w in idx and w != v] for v in nodes]
    result: list[list[str]] = []
    blocked = [False] * n
    blocks: list[set[int]] = [set() for _ in range(n)]
    path: list[int] = []

    def unblock(u: int) -> None:
        pending = [u]
        while pending:
            x = pending.pop()
            if not blocked[x]:
                continue
            blocked[x] = False
            pending.extend(blocks[x])
            blocks[x].clear()

    def circuit(v: int, start: int, sub: list[list[int]]) -> bool:
        found = False
        path.append(v)
        blocked[v] = True
        for w in sub[v]:
            if w == start:
                result.append([nodes[x] for x in path])
                found = True
            elif not blocked[w] and circuit(w, start, sub):
                found = True
        if found:
            unblock(v)
        else:
            for w in sub[v]:
                blocks[w].add(v)
        path.pop()
        return found

    for start in range(n):
        sub = [[w for w in row if w >= start] for row in base]
        for i in range(n):
            blocked[i] = False
            blocks[i].clear()
        circuit(start, start, sub)
    return result


def find_cycles(s: Scenario) -> list[list[str]]:
    """All elementary cycles in the link digraph, as link-id sequences.

    Parallel links expand to distinct cycles. Each cycle is reported once, in
    canonical rotation (smallest link id first); self-loops included. Output
    is sorted by (length, link ids).
    """
    nodes = sorted({l.source for l in s.links} | {l.target for l in s.links})
    adj: dict[str, list[str]] = {}
    links_between: dict[tuple[str, str], list[str]] = {}
    for link in s.links:
        adj.setdefault(link.source, []).append(link.target)
        links_between.setdefault((link.source, link.target), []).append(link.id)
    for key in adj:
        adj[key] = sorted(set(adj[key]))
    for key in links_between:
        links_between[key].sort()

    node_cycles = [[v] for v in nodes if (v, v) in links_between]
    node_cycles += _node_cycles(nodes, adj)

    out: set[tuple[str, ...]] = set()
    for cyc in node_cycles:
        hops = [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]
        for combo in product(*(links_between[h] for h in hops)):
            seq = list(combo)
            pivot = seq.index(min(seq))
            out.add(tuple(seq[pivot:] + seq[:pivot]))
    return [list(c) for c in sorted(out, key=lambda c: (len(c), c))]


# ---------------------------------------------------------------------------
# proximity spread oracle


def proximity_spread_oracle(s: Scenario, seed_agent: str, action: str) -> dict[str, int]:
    """BFS depths over the undirected proximity graph of one shared action.

    Edge between two agents iff both have ``action`` assigned and their
    separation is within the action's impact radius. Independent of the
    engine by construction: no trigger, cooldown, or distance code is shared.
    """
    template = s.find_action(action)
    if template is None or not isinstance(template, ActionTemplate):
        raise UnknownAction(f"{action!r} is not an agent action template")
    seed = s.find_agent(seed_agent)
    if seed is None:
        raise UnknownAgent(f"agent {seed_agent!r} is not defined")
    if action not in seed.assigned:
        raise UnknownAction(f"seed agent {seed_agent!r} does not have {action!r} assigned")

    members = sorted((a for a in s.agents if action in a.assigned), key=lambda a: a.id)
    positions = {a.id: (a.position.x, a.position.y, a.position.z) for a in members}
    radius_sq = template.impact_radius * template.impact_radius

    depths = {seed_agent: 0}
    frontier = [seed_agent]
    while frontier:
        nxt: list[str] = []
        for aid in frontier:
            ax, ay, az = positions[aid]
            for other in members:
                if other.id in depths:
                    continue
                bx, by, bz = positions[other.id]
                dx, dy, dz = ax - bx, ay - by, az - bz
                if dx * dx + dy * dy + dz * dz <= radius_sq:
                    depths[other.id] = depths[aid] + 1
                    nxt.append(other.id)
        frontier = nxt
    return depths


# ---------------------------------------------------------------------------
# spatial map


@dataclass
class SpatialMap:
    """Top-down (x, z) grid; a cell lists every (agent, action) disc whose
    radius covers the cell center. y is ignored for display."""

    cell: float
    origin_x: float  # center of column 0
    origin_z: float  # center of row 0
    cols: int
    rows: int
    cells: dict[tuple[int, int], list[tuple[str, str]]] = field(default_factory=dict)
    discs: list[dict[str, Any]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def center(self, col: int, row: int) -> tuple[float, float]:
        return (self.origin_x + col * self.cell, self.origin_z + row * self.cell)

    def text_grid(self) -> str:
        """One row per line, top row = largest z; '.' empty, else count (9+ clamps)."""
        lines = []
        for row in range(self.rows - 1, -1, -1):
            line = []
            for col in range(self.cols):
                n = len(self.cells.get((col, row), ()))
                line.append("." if n == 0 else str(min(n, 9)))
            lines.append("".join(line))
        return "\n".join(lines)

    def to_doc(self) -> dict[str, Any]:
        return {
            "kind": "spatialmap",
            "cell": self.cell,
            "origin": [self.origin_x, self.origin_z],
            "cols": self.cols,
            "rows": self.rows,
            "discs": self.discs,
            "cells": [
                {"col": col, "row": row, "entries": [list(e) for e in entries]}
                for (col, row), entries in sorted(self.cells.items())
            ],
            "warnings": self.warnings,
            "text": self.text_grid(),
        }


def export_spatial_map(s: Scenario, cell: float = 1.0) -> SpatialMap:
    """Rasterize every assigned action's impact disc onto a top-down grid.

    The grid covers the agents' bounding box padded by the largest radius;
    cell membership is inclusive of the boundary.
    """
    if not s.agents:
        raise AnalysisError("cannot map a scenario with no agents")
    if cell <= 0:
        raise AnalysisError("cell size must be > 0")

    templates = {a.id: a for a in s.templates()}
    discs: list[tuple[str, str, float, float, float]] = []
    for agent in sorted(s.agents, key=lambda a: a.id):
        for action_id in sorted(agent.assigned):
            template = templates.get(action_id)
            if template is not None:
                discs.append((agent.id, action_id, agent.position.x, agent.position.z,
                              float(template.impact_radius)))

    max_radius = max((d[4] for d in discs), default=0.0)
    xs = [a.position.x for a in s.agents]
    zs = [a.position.z for a in s.agents]
    min_x, max_x = min(xs) - max_radius, max(xs) + max_radius
    min_z, max_z = min(zs) - max_radius, max(zs) + max_radius
    cols = int(math.floor((max_x - min_x) / cell + 1e-9)) + 1
    rows = int(math.floor((max_z - min_z) / cell + 1e-9)) + 1

    grid = SpatialMap(cell=cell, origin_x=min_x, origin_z=min_z, cols=cols, rows=rows)
    grid.discs = [
        {"agent": a, "action": act, "center": [cx, cz], "radius": r}
        for a, act, cx, cz, r in discs
    ]
    for agent_id, action_id, cx, cz, radius in discs:
        r_sq = radius * radius
        col_lo = max(0, int(math.ceil((cx - radius - min_x) / cell - 1e-9)))
        col_hi = min(cols - 1, int(math.floor((cx + radius - min_x) / cell + 1e-9)))
        row_lo = max(0, int(math.ceil((cz - radius - min_z) / cell - 1e-9)))
        row_hi = min(rows - 1, int(math.floor((cz + radius - min_z) / cell + 1e-9)))
        for col in range(col_lo, col_hi + 1):
            for row in range(row_lo, row_hi + 1):
                px, pz = grid.center(col, row)
                if (px - cx) ** 2 + (pz - cz) ** 2 <= r_sq:
                    grid.cells.setdefault((col, row), []).append((agent_id, action_id))

    if max_radius == 0.0 and len({(a.position.x, a.position.y, a.position.z)
                                  for a in s.agents}) == 1:
        grid.warnings.append("degenerate-scene: all agents co-located with radius 0")
    return grid


# ---------------------------------------------------------------------------
# structured result documents (shared by the CLI and the service)


def cycles_doc(s: Scenario) -> dict[str, Any]:
    cycles = find_cycles(s)
    return {"kind": "cycles", "count": len(cycles), "cycles": [{"links": c} for c in cycles]}


def reach_doc(s: Scenario) -> dict[str, Any]:
    reachable = reachable_actions(s)
    all_ids = {a.id for a in s.actions}
    return {
        "kind": "reach",
        "reachable": sorted(reachable & all_ids),
        "unreachable": sorted(all_ids - reachable),
    }


def analyze(s: Scenario, kind: str, cell: float = 1.0) -> dict[str, Any]:
    """Dispatch an analysis by kind; returns the structured result document."""
    if kind == "chains":
        return chain_stats(s).to_doc()
    if kind == "cycles":
        return cycles_doc(s)
    if kind == "reach":
        return reach_doc(s)
    if kind == "spatialmap":
        return export_spatial_map(s, cell).to_doc()
    raise AnalysisError(f"unknown analysis kind {kind!r}")
