"""Uniform grid index for radius queries over agent positions.

Candidates returned by ``query`` are a superset of the agents within the
radius; callers do the exact distance check. Cell size is fixed per session,
chosen from the largest trigger radius in the scenario so most queries touch
a 3x3x3 neighborhood.
"""

from __future__ import annotations

import math

from .model import Position


class SpatialIndex:
    def __init__(self, cell: float):
        self.cell = max(cell, 1e-9)
        self._cells: dict[tuple[int, int, int], set[str]] = {}
        self._where: dict[str, tuple[int, int, int]] = {}

    def _key(self, pos: Position) -> tuple[int, int, int]:
        c = self.cell
        return (math.floor(pos.x / c), math.floor(pos.y / c), math.floor(pos.z / c))

    def insert(self, agent_id: str, pos: Position) -> None:
        key = self._key(pos)
        self._cells.setdefault(key, set()).add(agent_id)
        self._where[agent_id] = key

    def move(self, agent_id: str, pos: Position) -> None:
        old = self._where.get(agent_id)
        new = self._key(pos)
        if old == new:
            return
        if old is not None:
            bucket = self._cells.get(old)
            if bucket is not None:
                bucket.discard(agent_id)
                if not bucket:
                    del self._cells[old]
        self._cells.setdefault(new, set()).add(agent_id)
        self._where[agent_id] = new

    def remove(self, agent_id: str) -> None:
        key = self._where.pop(agent_id, None)
        if key is None:
            return
        bucket = self._cells.get(key)
        if bucket is not None:
            bucket.discard(agent_id)
            if not bucket:
                del self._cells[key]

    def query(self, center: Position, radius: float) -> list[str]:
        """Ids of agents in cells overlapping the sphere (unsorted superset)."""
        c = self.cell
        span = math.ceil(radius / c) if radius > 0 else 0
        cx, cy, cz = self._key(center)
        out: list[str] = []
        for ix in range(cx - span, cx + span + 1):
            for iy in range(cy - span, cy + span + 1):
                for iz in range(cz - span, cz + span + 1):
                    bucket = self._cells.get((ix, iy, iz))
                    if bucket:
                        out.extend(bucket)
        return out
