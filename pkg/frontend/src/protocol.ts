/**
 * Message types for the assessment service websocket protocol.
 *
 * Mirrors the server's GET /schema descriptor exactly; the schema test
 * compares MESSAGE_SCHEMA against a fixture captured from the service.
 */

export type Role = "participant" | "assessor";
export type Phase =
  | "viewing_pending"
  | "viewing"
  | "viewed"
  | "construction"
  | "done";
export type Action = "place" | "remove";
export type AckStatus = "accepted" | "flagged" | "rejected" | "resolved";

export interface Waypoint {
  x: number;
  y: number;
  heading: number;
}

export interface Panorama {
  waypoint_index: number;
  sweep_degrees: number;
  rate_deg_per_s: number;
}

export interface ClientMessage {
  kind: string;
  seq: number;
  [field: string]: unknown;
}

export interface ServerMessage {
  kind: string;
  seq: number;
  re?: number;
  [field: string]: unknown;
}

export interface EventAck extends ServerMessage {
  kind: "event_ack";
  event_id: string;
  status: AckStatus;
  error?: string | null;
  state_hash: string;
}

export interface TrialStart extends ServerMessage {
  kind: "trial_start";
  index: number;
  trial_kind: string;
  num_buildings: number;
}

export interface TourData extends ServerMessage {
  kind: "tour_data";
  waypoints?: Waypoint[];
  north_heading?: number;
  panorama?: Panorama;
  resume_at?: number;
}

export const MESSAGE_SCHEMA = {
  version: 1,
  client: {
    join: ["role", "participant", "group"],
    tour_ready: [],
    tour_pause: ["waypoint_index"],
    tour_resume: [],
    tour_complete: [],
    board_event: ["action", "building", "col", "row", "orientation"],
    done: [],
    resolve: ["event_id", "building"],
    advance: [],
    abort: [],
  },
  server: {
    joined: ["role", "session_id"],
    trial_start: ["index", "kind", "num_buildings"],
    tour_data: ["waypoints", "north_heading", "panorama", "resume_at"],
    phase: ["phase"],
    event_ack: ["event_id", "status", "error", "state_hash"],
    correction_needed: ["event_id"],
    trial_score: ["report"],
    session_complete: ["status"],
    error: ["code", "detail"],
  },
  assessor_only: ["abort", "advance", "resolve"],
} as const;

export const BUILDING_IDS = [
  "B01",
  "B02",
  "B03",
  "B04",
  "B05",
  "B06",
  "B07",
  "B08",
  "B09",
  "B10",
] as const;

export const BUILDING_LABELS: Record<string, { label: string; color: string }> = {
  B01: { label: "Bakery", color: "red" },
  B02: { label: "Church", color: "blue" },
  B03: { label: "School", color: "yellow" },
  B04: { label: "Grocery", color: "green" },
  B05: { label: "Post Office", color: "orange" },
  B06: { label: "Bank", color: "purple" },
  B07: { label: "Cafe", color: "brown" },
  B08: { label: "Library", color: "teal" },
  B09: { label: "Pharmacy", color: "pink" },
  B10: { label: "Fire Hall", color: "crimson" },
};

export const GRID_COLUMNS = 24;
export const GRID_ROWS = 16;
export const ORIENTATIONS = [0, 90, 180, 270] as const;

/** Street cells are permanently blocked; must match the engine's mask. */
export function defaultStreetMask(): Set<string> {
  const cells = new Set<string>();
  for (let row = 0; row < GRID_ROWS; row++) cells.add(`6,${row}`);
  for (let col = 0; col < GRID_COLUMNS; col++) cells.add(`${col},8`);
  for (let row = 9; row < GRID_ROWS; row++) cells.add(`17,${row}`);
  return cells;
}
