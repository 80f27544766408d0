// The studio application object: owns the state, folds server frames, sends
// client messages through an injected transport, and re-renders after every
// frame. The transport is a function so tests can capture outgoing messages
// and replay recorded transcripts without a socket.

import { Envelope, ScenarioDoc, inputMessage, loadMessage, snapshotMessage,
         stepMessage } from "./protocol.js";
import { StudioState, createState, handleFrame } from "./state.js";
import { render } from "./render.js";

export type SendFn = (message: Envelope) => void;

export class Studio {
  state: StudioState;
  private root: HTMLElement;
  private send: SendFn;
  private nextId = 1;
  private playTimer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, send: SendFn) {
    this.state = createState();
    this.root = root;
    this.send = send;
    render(this.state, this.root);
  }

  private msgId(): number {
    return this.nextId++;
  }

  /** Fold one server frame and re-render. */
  handleFrame(frame: Envelope): void {
    handleFrame(this.state, frame);
    render(this.state, this.root);
  }

  /** Send the scenario for loading; the document also drives local views. */
  loadScenario(doc: ScenarioDoc, seed?: number): void {
    this.state.scenario = doc;
    this.send(loadMessage(this.msgId(), doc, seed));
    render(this.state, this.root);
  }

  // -- play panel --------------------------------------------------------

  touch(target: string): void {
    const pos = this.state.player?.position ?? [0, 0, 0];
    this.send(inputMessage(this.msgId(), {
      method: "gesture", gesture: "touch", target, position: pos,
    }));
  }

  lookAt(target: string): void {
    const pos = this.state.player?.position ?? [0, 0, 0];
    const agent = this.state.agents.find((a) => a.id === target)
      ?? { position: pos };
    const gaze = [
      agent.position[0] - pos[0],
      agent.position[1] - pos[1],
      agent.position[2] - pos[2],
    ];
    this.send(inputMessage(this.msgId(), {
      method: "gesture", gesture: "look-at", target, position: pos, gaze,
    }));
  }

  say(utterance: string): void {
    this.send(inputMessage(this.msgId(), { method: "language", utterance }));
  }

  pressKey(symbol: string): void {
    this.send(inputMessage(this.msgId(), { method: "device", symbol }));
  }

  movePlayer(x: number, y: number, z: number): void {
    this.send(inputMessage(this.msgId(), {
      method: "gesture", gesture: "walk-to", position: [x, y, z],
    }));
  }

  // -- step controls -----------------------------------------------------

  step(n = 1): void {
    this.send(stepMessage(this.msgId(), n));
  }

  requestSnapshot(): void {
    this.send(snapshotMessage(this.msgId()));
  }

  play(ticksPerSecond = 10): void {
    if (this.playTimer !== null) return;
    this.playTimer = setInterval(() => this.step(1), 1000 / ticksPerSecond);
  }

  pause(): void {
    if (this.playTimer !== null) {
      clearInterval(this.playTimer);
      this.playTimer = null;
    }
  }
}

/** Connect a real WebSocket, load the scenario once the hello frame arrives,
 * and return the wired studio. */
export function connectAndLoad(root: HTMLElement, url: string,
                               doc: ScenarioDoc, seed?: number): Studio {
  const socket = new WebSocket(url);
  const studio = new Studio(root, (msg) => socket.send(JSON.stringify(msg)));
  socket.onmessage = (ev) => {
    const frame = JSON.parse(String(ev.data)) as Envelope;
    const firstHello = frame.type === "hello" && !studio.state.connected;
    studio.handleFrame(frame);
    if (firstHello) studio.loadScenario(doc, seed);
  };
  socket.onerror = () => {
    studio.state.banner = `connection failed: ${url}`;
    studio.handleFrame({ id: null, type: "noop", body: {} });
  };
  return studio;
}
