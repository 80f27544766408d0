// Full re-render of the studio DOM from state. Rendering is a pure function
// of (state, scenario document), so replaying a recorded transcript always
// reproduces the same final DOM.

import { StudioState } from "./state.js";
import { buildGraph, buildMap } from "./viewmodel.js";

const SVG = "http://www.w3.org/2000/svg";
const PLAYER_FILL = "#3b82f6"; // blue
const AGENT_FILL = "#22c55e"; // green

function el(tag: string, attrs: Record<string, string> = {},
            text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {},
               text?: string): SVGElement {
  const node = document.createElementNS(SVG, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderGraph(state: StudioState): SVGElement {
  const vm = buildGraph(state.scenario ?? { version: "0" }, state);
  const svg = svgEl("svg", {
    class: "graph",
    viewBox: `0 0 ${vm.width} ${vm.height}`,
    "data-nodes": String(vm.nodes.length),
  });
  const byId = new Map(vm.nodes.map((n) => [n.id, n]));
  for (const edge of vm.edges) {
    const a = byId.get(edge.source);
    const b = byId.get(edge.target);
    if (!a || !b) continue;
    if (edge.source === edge.target) {
      // self-link: loop arc above the node
      svg.appendChild(svgEl("path", {
        class: "edge self-loop",
        "data-link": edge.id,
        d: `M ${a.x - 10} ${a.y - 18} C ${a.x - 42} ${a.y - 66}, `
          + `${a.x + 42} ${a.y - 66}, ${a.x + 10} ${a.y - 18}`,
        fill: "none", stroke: "#94a3b8", "stroke-width": "2",
      }));
    } else {
      svg.appendChild(svgEl("line", {
        class: "edge",
        "data-link": edge.id,
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        stroke: "#94a3b8", "stroke-width": "2",
      }));
    }
    if (edge.delay > 0) {
      svg.appendChild(svgEl("text", {
        class: "delay-badge",
        x: String((a.x + b.x) / 2), y: String((a.y + b.y) / 2 - 6),
      }, `+${edge.delay}`));
    }
  }
  for (const node of vm.nodes) {
    const cls = ["node", node.kind, node.pulsing ? "pulse" : "",
                 node.running ? "running" : ""].filter(Boolean).join(" ");
    svg.appendChild(svgEl("circle", {
      class: cls,
      "data-action": node.id,
      cx: String(node.x), cy: String(node.y), r: "22",
      fill: node.kind === "player" ? PLAYER_FILL : AGENT_FILL,
    }));
    svg.appendChild(svgEl("text", {
      class: "node-label", x: String(node.x), y: String(node.y + 38),
      "text-anchor": "middle",
    }, node.label));
  }
  return svg;
}

function renderMap(state: StudioState): SVGElement {
  const vm = buildMap(state.scenario ?? { version: "0" }, state);
  const svg = svgEl("svg", {
    class: "map",
    viewBox: `${vm.minX} ${vm.minZ} ${Math.max(vm.width, 1)} ${Math.max(vm.height, 1)}`,
    "data-discs": String(vm.discs.length),
  });
  for (const disc of vm.discs) {
    svg.appendChild(svgEl("circle", {
      class: disc.active ? "disc active" : "disc",
      "data-agent": disc.agent,
      "data-action": disc.action,
      cx: String(disc.cx), cy: String(disc.cz), r: String(disc.radius),
      fill: disc.active ? "rgba(239,68,68,0.35)" : "rgba(34,197,94,0.15)",
      stroke: "#16a34a", "stroke-width": "0.05",
    }));
  }
  for (const dot of vm.dots) {
    const cls = ["dot", dot.frozen ? "frozen" : "", dot.active ? "" : "inactive"]
      .filter(Boolean).join(" ");
    svg.appendChild(svgEl("circle", {
      class: cls, "data-agent": dot.id,
      cx: String(dot.x), cy: String(dot.z), r: "0.18", fill: "#0f172a",
    }));
  }
  if (vm.player) {
    svg.appendChild(svgEl("rect", {
      class: "player-marker",
      x: String(vm.player.x - 0.15), y: String(vm.player.z - 0.15),
      width: "0.3", height: "0.3", fill: PLAYER_FILL,
    }));
  }
  return svg;
}

function renderLegend(state: StudioState): HTMLElement {
  const vm = buildMap(state.scenario ?? { version: "0" }, state);
  const box = el("div", { class: "legend" });
  for (const item of vm.legend) {
    box.appendChild(el("span", { class: "legend-item" },
                       `${item.action} r=${item.radius}`));
  }
  return box;
}

export function render(state: StudioState, root: HTMLElement): void {
  root.textContent = "";
  const app = el("div", { class: "studio" });

  const header = el("header", {});
  header.appendChild(el("span", { class: "title" }, "causaldeck studio"));
  header.appendChild(el("span", {
    class: state.connected ? "conn ok" : "conn down",
  }, state.connected ? `connected (protocol ${state.protocol})` : "disconnected"));
  header.appendChild(el("span", { class: "tick", "data-tick": String(state.tick) },
                        `tick ${state.tick}`));
  app.appendChild(header);

  if (state.banner) {
    app.appendChild(el("div", { class: "banner" }, state.banner));
  }

  if (state.diagnostics.length > 0) {
    const panel = el("div", { class: "diagnostics" });
    for (const d of state.diagnostics) {
      panel.appendChild(el("div", { class: `diag ${d.severity}` },
                           `${d.code} ${d.location}: ${d.message}`));
    }
    app.appendChild(panel);
  }

  if (state.scenario) {
    app.appendChild(renderGraph(state));
    app.appendChild(renderMap(state));
    app.appendChild(renderLegend(state));
  }

  const feed = el("ol", { class: "feed" });
  for (const entry of state.feed) {
    feed.appendChild(el("li", {
      class: `feed-${entry.kind}`,
      "data-kind": entry.kind,
      "data-tick": String(entry.tick),
      "data-action": entry.action,
      "data-owner": entry.owner,
    }, `t${entry.tick} ${entry.text}`));
  }
  app.appendChild(feed);

  const toasts = el("div", { class: "toasts" });
  for (const toast of state.toasts) {
    toasts.appendChild(el("div", { class: "toast" }, toast));
  }
  app.appendChild(toasts);

  root.appendChild(app);
}
