// Replays a transcript recorded from a live service session (cascade fire
// cascade: load, snapshot, step 5, touch, step 95) against the studio and
// asserts on the resulting DOM. The studio is a pure client, so the same
// transcript must always produce the same final DOM.

import { beforeEach, describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { Envelope, ScenarioDoc } from "../src/protocol.js";
import { Studio } from "../src/studio.js";

const here = dirname(fileURLToPath(import.meta.url));
const transcript = JSON.parse(
  readFileSync(join(here, "transcript.json"), "utf-8")) as Envelope[];
const cascade = JSON.parse(
  readFileSync(join(here, "fire_cascade.scenario.json"), "utf-8")) as ScenarioDoc;

function replay(): { studio: Studio; root: HTMLElement; sent: Envelope[] } {
  const root = document.createElement("div");
  const sent: Envelope[] = [];
  const studio = new Studio(root, (msg) => sent.push(msg));
  for (const frame of transcript) {
    const firstHello = frame.type === "hello" && !studio.state.connected;
    studio.handleFrame(frame);
    if (firstHello) studio.loadScenario(cascade, 1);
  }
  return { studio, root, sent };
}

beforeEach(() => {
  document.body.textContent = "";
});

describe("cascade transcript replay", () => {
  it("renders three graph nodes with player/agent styling", () => {
    const { root } = replay();
    const nodes = root.querySelectorAll("circle.node");
    expect(nodes.length).toBe(3);
    const player = root.querySelector('circle.node[data-action="touch"]')!;
    expect(player.classList.contains("player")).toBe(true);
    expect(player.getAttribute("fill")).toBe("#3b82f6"); // blue
    for (const id of ["start-a-fire", "burn"]) {
      const agent = root.querySelector(`circle.node[data-action="${id}"]`)!;
      expect(agent.classList.contains("agent")).toBe(true);
      expect(agent.getAttribute("fill")).toBe("#22c55e"); // green
    }
    expect(root.querySelectorAll("line.edge").length).toBe(2);
    expect(root.querySelectorAll("path.self-loop").length).toBe(1); // burn -> burn
  });

  it("draws one impact-radius disc per assigned action", () => {
    const { root } = replay();
    const discs = root.querySelectorAll("circle.disc");
    expect(discs.length).toBe(6); // campfire's start-a-fire + 5 tree burns
    const campfire = root.querySelector(
      'circle.disc[data-agent="campfire"][data-action="start-a-fire"]')!;
    expect(campfire.getAttribute("r")).toBe("1");
    const tree = root.querySelector(
      'circle.disc[data-agent="tree_3"][data-action="burn"]')!;
    expect(tree.getAttribute("r")).toBe("2");
    const legend = root.querySelector(".legend")!.textContent!;
    expect(legend).toContain("burn r=2");
    expect(legend).toContain("start-a-fire r=1");
  });

  it("animates the cascade in event-tick order", () => {
    const { root } = replay();
    const burns = [...root.querySelectorAll(
      'li[data-kind="activated"][data-action="burn"]')];
    const owners = burns.map((li) => li.getAttribute("data-owner"));
    const ticks = burns.map((li) => Number(li.getAttribute("data-tick")));
    // first ignition of each tree advances one tick per BFS layer
    const firstTick = new Map<string, number>();
    owners.forEach((owner, i) => {
      if (owner && !firstTick.has(owner)) firstTick.set(owner, ticks[i]);
    });
    expect([...firstTick.entries()]).toEqual([
      ["tree_1", 8], ["tree_2", 9], ["tree_3", 10], ["tree_4", 11], ["tree_5", 12],
    ]);
    // feed entries appear in log order: ticks never decrease
    const allTicks = [...root.querySelectorAll("li[data-tick]")]
      .map((li) => Number(li.getAttribute("data-tick")));
    expect(allTicks).toEqual([...allTicks].sort((a, b) => a - b));
    expect(root.querySelector("[data-tick]")).toBeTruthy();
    expect(root.querySelector(".tick")!.textContent).toBe("tick 100");
  });

  it("reaches the same final DOM on every replay", () => {
    const first = replay().root.innerHTML;
    const second = replay().root.innerHTML;
    expect(second).toBe(first);
    expect(first).toMatchSnapshot();
  });

  it("play panel touch sends the matching input message", () => {
    const { studio, sent } = replay();
    sent.length = 0;
    studio.touch("campfire");
    expect(sent.length).toBe(1);
    expect(sent[0].type).toBe("input");
    expect(sent[0].body).toMatchObject({
      method: "gesture", gesture: "touch", target: "campfire",
    });
    studio.say("hello there");
    expect(sent[1].body).toMatchObject({ method: "language", utterance: "hello there" });
    studio.step(5);
    expect(sent[2]).toMatchObject({ type: "step", body: { n: 5 } });
  });
});

describe("degraded paths", () => {
  it("renders diagnostics and no views when the load is rejected", () => {
    const root = document.createElement("div");
    const studio = new Studio(root, () => {});
    studio.handleFrame({ id: null, type: "hello", body: { protocol: "1" } });
    studio.handleFrame({
      id: 1, type: "loaded",
      body: {
        ok: false,
        diagnostics: [{ severity: "error", code: "E001",
                        location: "/links/0/target", message: "dangling" }],
      },
    });
    expect(root.querySelector(".diag.error")!.textContent).toContain("E001");
    expect(root.querySelector(".banner")!.textContent).toContain("rejected");
  });

  it("turns engine warnings into toasts", () => {
    const root = document.createElement("div");
    const studio = new Studio(root, () => {});
    studio.handleFrame({ id: null, type: "hello", body: { protocol: "1" } });
    studio.handleFrame({
      id: null, type: "events",
      body: { records: [{ tick: 4, seq: 1, kind: "warning", subject: "input",
                          payload: { reason: "out-of-range" } }] },
    });
    expect(root.querySelector(".toast")!.textContent).toContain("out-of-range");
  });

  it("honors x-editor-coords for node placement", () => {
    const doc: ScenarioDoc = {
      version: "1.0",
      actions: [
        { id: "walk", kind: "agent", "x-editor-coords": [321, 111] },
      ],
      links: [],
      agents: [],
    };
    const root = document.createElement("div");
    const studio = new Studio(root, () => {});
    studio.state.scenario = doc;
    studio.handleFrame({ id: null, type: "hello", body: { protocol: "1" } });
    const node = root.querySelector('circle.node[data-action="walk"]')!;
    expect(node.getAttribute("cx")).toBe("321");
    expect(node.getAttribute("cy")).toBe("111");
  });
});
