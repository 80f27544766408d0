// Studio state and the server-frame reducer. The state is a pure function of
// (loaded scenario document, ordered server frames), which is what makes the
// transcript-replay snapshot test meaningful.
//
// Event record kinds and their visual mapping:
//   activated         -> graph node pulse + feed line + map disc highlight
//   fired             -> feed line (link id, source -> target)
//   spoke             -> feed line with the utterance
//   spawned           -> feed line; the agent dot appears with the next snapshot
//   frozen            -> feed line; agent dot styling from the next snapshot
//   command-started / command-finished -> feed lines
//   warning           -> toast
//   header            -> unrendered (session metadata only)

import {
  Diagnostic,
  Envelope,
  LogRecord,
  ScenarioDoc,
  Snapshot,
  SnapshotAgent,
} from "./protocol.js";

export interface FeedEntry {
  tick: number;
  seq: number;
  kind: string;
  action: string;
  owner: string;
  text: string;
}

export interface StudioState {
  connected: boolean;
  protocol: string | null;
  scenario: ScenarioDoc | null;
  diagnostics: Diagnostic[];
  sessionOk: boolean;
  tick: number;
  agents: SnapshotAgent[];
  player: { position: number[]; running: string[] } | null;
  lastSeq: number;
  feed: FeedEntry[];
  toasts: string[];
  lastActivation: Map<string, { owner: string; tick: number }>;
  banner: string | null;
}

export function createState(): StudioState {
  return {
    connected: false,
    protocol: null,
    scenario: null,
    diagnostics: [],
    sessionOk: false,
    tick: 0,
    agents: [],
    player: null,
    lastSeq: -1,
    feed: [],
    toasts: [],
    lastActivation: new Map(),
    banner: null,
  };
}

function describe(record: LogRecord): FeedEntry {
  const p = record.payload;
  const owner = String(p.owner ?? p.dst_owner ?? record.subject);
  let action = record.subject;
  let text: string;
  switch (record.kind) {
    case "activated":
      text = `${record.subject} activated on ${owner}`;
      break;
    case "fired":
      action = String(p.target ?? record.subject);
      text = `${p.source} -[${record.subject}]-> ${p.target} on ${p.dst_owner}`;
      break;
    case "spoke":
      action = String(p.action ?? "");
      text = `${record.subject} says "${p.text}"`;
      break;
    case "spawned":
      action = String(p.prototype ?? "");
      text = `${record.subject} spawned by ${p.by}`;
      break;
    case "frozen":
      text = `${record.subject} ${p.frozen ? "frozen" : "unfrozen"}`;
      break;
    case "command-started":
    case "command-finished":
      text = `${record.subject}/${p.kind} ${record.kind.slice(8)} on ${owner}`;
      break;
    default:
      text = `${record.kind} ${record.subject}`;
  }
  return { tick: record.tick, seq: record.seq, kind: record.kind, action, owner, text };
}

function applyRecords(state: StudioState, records: LogRecord[]): void {
  for (const record of records) {
    if (record.seq <= state.lastSeq) continue; // snapshots may overlap pushes
    state.lastSeq = record.seq;
    if (record.kind === "header") continue;
    if (record.kind === "warning") {
      const reason = String(record.payload.reason ?? "warning");
      state.toasts.push(`no effect: ${reason} (${record.subject}, tick ${record.tick})`);
      continue;
    }
    if (record.kind === "activated") {
      state.lastActivation.set(record.subject, {
        owner: String(record.payload.owner), tick: record.tick,
      });
    }
    state.feed.push(describe(record));
  }
}

/** Fold one server frame into the state; returns the state for chaining. */
export function handleFrame(state: StudioState, frame: Envelope): StudioState {
  switch (frame.type) {
    case "hello":
      state.connected = true;
      state.protocol = String(frame.body.protocol ?? "");
      break;
    case "loaded": {
      state.diagnostics = (frame.body.diagnostics ?? []) as Diagnostic[];
      state.sessionOk = Boolean(frame.body.ok);
      state.tick = 0;
      state.feed = [];
      state.toasts = [];
      state.lastSeq = -1;
      state.lastActivation = new Map();
      state.banner = state.sessionOk ? null : "scenario rejected: see diagnostics";
      break;
    }
    case "state": {
      const snap = frame.body as unknown as Snapshot;
      applyRecords(state, snap.events ?? []);
      state.tick = snap.tick;
      state.agents = snap.agents;
      state.player = snap.player;
      break;
    }
    case "events":
      applyRecords(state, (frame.body.records ?? []) as LogRecord[]);
      break;
    case "error":
      state.banner = `${frame.body.code}: ${frame.body.message}`;
      break;
    default:
      break; // analysis frames are surfaced by callers that requested them
  }
  return state;
}

/** Actions currently running on some owner, per the latest snapshot. */
export function runningActions(state: StudioState): Set<string> {
  const out = new Set<string>();
  for (const agent of state.agents) for (const a of agent.running) out.add(a);
  if (state.player) for (const a of state.player.running) out.add(a);
  return out;
}
