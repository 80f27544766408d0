// Wire types for the causaldeck session protocol. The studio is a pure
// client of this surface: everything rendered comes either from the loaded
// scenario document or from server frames.

export const PROTOCOL_VERSION = "1";

export interface Envelope {
  id: string | number | null;
  type: string;
  body: Record<string, unknown>;
}

export interface LogRecord {
  tick: number;
  seq: number;
  kind: string;
  subject: string;
  payload: Record<string, unknown>;
}

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  location: string;
  message: string;
}

export interface SnapshotAgent {
  id: string;
  position: number[];
  frozen: boolean;
  active: boolean;
  attributes: Record<string, unknown>;
  running: string[];
}

export interface Snapshot {
  tick: number;
  scenario: string;
  player: { position: number[]; running: string[] };
  agents: SnapshotAgent[];
  bindings: { action: string; method: string; ready_at: number }[];
  events: LogRecord[];
  last_seq: number;
}

// Scenario document shapes (the subset the studio renders).

export interface BindingDoc {
  method: "device" | "language" | "gesture";
  symbol?: string;
  mode?: string;
  category?: string;
  gesture?: string;
  target?: string;
  distance?: number;
}

export interface ActionDoc {
  id: string;
  kind: "agent" | "player";
  label?: string;
  impact_radius?: number;
  range?: number;
  binding?: BindingDoc;
  auto_start?: boolean;
  [extra: string]: unknown; // x- extension fields, e.g. x-editor-coords
}

export interface AgentDoc {
  id: string;
  position: number[];
  assigned?: string[];
  [extra: string]: unknown;
}

export interface LinkDoc {
  id: string;
  source: string;
  target: string;
  delay?: number;
}

export interface ScenarioDoc {
  version: string;
  agents?: AgentDoc[];
  prototypes?: AgentDoc[];
  actions?: ActionDoc[];
  links?: LinkDoc[];
  [extra: string]: unknown;
}

export function loadMessage(id: string | number, scenario: ScenarioDoc,
                            seed?: number): Envelope {
  const body: Record<string, unknown> = { scenario };
  if (seed !== undefined) body.seed = seed;
  return { id, type: "load", body };
}

export function stepMessage(id: string | number, n: number): Envelope {
  return { id, type: "step", body: { n } };
}

export function snapshotMessage(id: string | number): Envelope {
  return { id, type: "snapshot", body: {} };
}

export function inputMessage(id: string | number,
                             body: Record<string, unknown>): Envelope {
  return { id, type: "input", body };
}
