// Browser entry: wires the play panel controls to a live session. Expects
// the service on the same host (causaldeck serve --studio-dir frontend/dist
// serves this bundle at /studio).

import { ScenarioDoc } from "./protocol.js";
import { Studio, connectAndLoad } from "./studio.js";

function controlBar(studio: () => Studio | null): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "controls";

  const mk = (label: string, onClick: () => void) => {
    const b = document.createElement("button");
    b.textContent = label;
    b.addEventListener("click", onClick);
    bar.appendChild(b);
    return b;
  };

  mk("step 1", () => studio()?.step(1));
  mk("step 10", () => studio()?.step(10));
  mk("play", () => studio()?.play(10));
  mk("pause", () => studio()?.pause());

  const target = document.createElement("input");
  target.placeholder = "agent id";
  bar.appendChild(target);
  mk("touch", () => studio()?.touch(target.value));
  mk("look at", () => studio()?.lookAt(target.value));

  const utterance = document.createElement("input");
  utterance.placeholder = "say something";
  bar.appendChild(utterance);
  mk("say", () => studio()?.say(utterance.value));
  return bar;
}

function boot(): void {
  const controlsHost = document.getElementById("controls")!;
  const view = document.getElementById("view")!;
  const file = document.getElementById("scenario-file") as HTMLInputElement;

  let studio: Studio | null = null;
  controlsHost.appendChild(controlBar(() => studio));

  file.addEventListener("change", async () => {
    const chosen = file.files?.[0];
    if (!chosen) return;
    const doc = JSON.parse(await chosen.text()) as ScenarioDoc;
    const url = `ws://${location.hostname}:${location.port || 7341}/ws`;
    studio = connectAndLoad(view, url, doc);
  });
}

boot();
