// View models derived from the scenario document plus live state: the
// trigger-action graph (player nodes blue, agent nodes green) and the
// top-down spatial map (x, z; y ignored for display).

import { ScenarioDoc } from "./protocol.js";
import { StudioState, runningActions } from "./state.js";

export interface GraphNode {
  id: string;
  kind: "player" | "agent";
  label: string;
  x: number;
  y: number;
  pulsing: boolean;
  running: boolean;
}

export interface GraphEdge {
  id: string;
  source: string;
  target: string;
  delay: number;
}

export interface GraphViewModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
}

const COL_W = 160;
const ROW_H = 90;
const MARGIN = 60;

/** Breadth-first column layout from player / auto-start roots; a node's
 * position persisted under x-editor-coords wins over the computed layout. */
export function buildGraph(doc: ScenarioDoc, state: StudioState): GraphViewModel {
  const actions = doc.actions ?? [];
  const links = doc.links ?? [];
  const depth = new Map<string, number>();
  const queue: string[] = [];
  for (const a of actions) {
    if (a.kind === "player" || a.auto_start) {
      depth.set(a.id, 0);
      queue.push(a.id);
    }
  }
  while (queue.length > 0) {
    const node = queue.shift()!;
    for (const l of links) {
      if (l.source === node && !depth.has(l.target)) {
        depth.set(l.target, depth.get(node)! + 1);
        queue.push(l.target);
      }
    }
  }
  const perColumn = new Map<number, number>();
  const running = runningActions(state);
  const recent = state.lastActivation;
  const nodes: GraphNode[] = [];
  for (const a of [...actions].sort((p, q) => p.id.localeCompare(q.id))) {
    const col = depth.get(a.id) ?? 0;
    const row = perColumn.get(col) ?? 0;
    perColumn.set(col, row + 1);
    let x = MARGIN + col * COL_W;
    let y = MARGIN + row * ROW_H;
    const coords = a["x-editor-coords"];
    if (Array.isArray(coords) && coords.length === 2) {
      x = Number(coords[0]);
      y = Number(coords[1]);
    }
    nodes.push({
      id: a.id,
      kind: a.kind,
      label: a.label || a.id,
      x,
      y,
      pulsing: recent.has(a.id),
      running: running.has(a.id),
    });
  }
  const width = MARGIN * 2 + COL_W * Math.max(1, ...[...depth.values()].map((d) => d + 0));
  const height = MARGIN * 2 + ROW_H * Math.max(1, ...[...perColumn.values()]);
  return {
    nodes,
    edges: links.map((l) => ({ id: l.id, source: l.source, target: l.target,
                               delay: l.delay ?? 0 })),
    width: Math.max(width, 320),
    height: Math.max(height, 200),
  };
}

export interface MapDisc {
  agent: string;
  action: string;
  cx: number;
  cz: number;
  radius: number;
  active: boolean;
}

export interface MapDot {
  id: string;
  x: number;
  z: number;
  frozen: boolean;
  active: boolean;
}

export interface MapViewModel {
  discs: MapDisc[];
  dots: MapDot[];
  player: { x: number; z: number } | null;
  legend: { action: string; radius: number }[];
  minX: number;
  minZ: number;
  width: number;
  height: number;
}

export function buildMap(doc: ScenarioDoc, state: StudioState): MapViewModel {
  const radii = new Map<string, number>();
  for (const a of doc.actions ?? []) {
    if (a.kind === "agent") radii.set(a.id, a.impact_radius ?? 0);
  }
  // live snapshot agents when present (they track movement/spawns); the
  // authored document otherwise, so a loaded-but-unstepped scenario renders
  const live = state.agents.length > 0
    ? state.agents.map((g) => ({
        id: g.id, position: g.position, frozen: g.frozen, active: g.active,
        assigned: (doc.agents ?? []).find((d) => d.id === g.id)?.assigned ?? [],
        running: g.running,
      }))
    : (doc.agents ?? []).map((g) => ({
        id: g.id, position: g.position, frozen: false, active: true,
        assigned: g.assigned ?? [], running: [] as string[],
      }));

  const discs: MapDisc[] = [];
  const dots: MapDot[] = [];
  for (const g of live) {
    dots.push({ id: g.id, x: g.position[0], z: g.position[2],
                frozen: g.frozen, active: g.active });
    for (const action of [...g.assigned].sort()) {
      const radius = radii.get(action);
      if (radius === undefined) continue;
      discs.push({
        agent: g.id, action, cx: g.position[0], cz: g.position[2], radius,
        active: g.running.includes(action),
      });
    }
  }
  const xs = dots.map((d) => d.x);
  const zs = dots.map((d) => d.z);
  const pad = Math.max(1, ...discs.map((d) => d.radius));
  const minX = (xs.length ? Math.min(...xs) : 0) - pad;
  const maxX = (xs.length ? Math.max(...xs) : 0) + pad;
  const minZ = (zs.length ? Math.min(...zs) : 0) - pad;
  const maxZ = (zs.length ? Math.max(...zs) : 0) + pad;
  const legendMap = new Map<string, number>();
  for (const d of discs) legendMap.set(d.action, d.radius);
  return {
    discs,
    dots,
    player: state.player
      ? { x: state.player.position[0], z: state.player.position[2] }
      : null,
    legend: [...legendMap.entries()]
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([action, radius]) => ({ action, radius })),
    minX,
    minZ,
    width: maxX - minX,
    height: maxZ - minZ,
  };
}
