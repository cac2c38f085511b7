/**
 * Client-side mirror of the engine's board configuration.
 *
 * Every board action is proposed optimistically (for the drag preview
 * only) and committed exclusively on the server's event_ack. After each
 * ack the mirror's hash must equal the ack's state_hash; a mismatch
 * means the mirror diverged and the client must resync.
 */

import { Action, AckStatus, BUILDING_IDS } from "./protocol";

export interface Placement {
  building: string;
  col: number;
  row: number;
  orientation: number;
}

export interface BoardAction {
  action: Action;
  building: string;
  col: number;
  row: number;
  orientation: number | null;
}

export interface AckResult {
  applied: boolean;
  hashMatches: boolean;
  localHash: string;
}

/** FNV-1a 32-bit, bit-identical to the engine's configuration hash. */
export function configurationHash(placements: Iterable<Placement>): string {
  const canonical = [...placements]
    .sort((a, b) => (a.building < b.building ? -1 : a.building > b.building ? 1 : 0))
    .map((p) => `${p.building}@${p.col},${p.row},${p.orientation}`)
    .join("|");
  let h = 0x811c9dc5;
  for (const byte of new TextEncoder().encode(canonical)) {
    h ^= byte;
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h.toString(16).padStart(8, "0");
}

export class ClientBoardState {
  readonly buildings: readonly string[];
  northHeading = 0;
  private board = new Map<string, Placement>();
  private pending: BoardAction | null = null;
  private dragging: string | null = null;

  constructor(buildings: readonly string[] = BUILDING_IDS) {
    this.buildings = buildings;
  }

  /** Buildings not on the board; palette ∪ board = all buildings. */
  get palette(): string[] {
    return this.buildings.filter((b) => !this.board.has(b));
  }

  get placements(): Placement[] {
    return [...this.board.values()].sort((a, b) =>
      a.building < b.building ? -1 : 1
    );
  }

  get(building: string): Placement | undefined {
    return this.board.get(building);
  }

  get dragInProgress(): string | null {
    return this.dragging;
  }

  beginDrag(building: string): void {
    if (!this.buildings.includes(building)) {
      throw new Error(`unknown building ${building}`);
    }
    this.dragging = building;
  }

  cancelDrag(): void {
    this.dragging = null;
  }

  /**
   * Record an action awaiting its ack. Only one action may be in flight:
   * the client never speculates past an unacknowledged event.
   */
  propose(action: BoardAction): void {
    if (this.pending !== null) {
      throw new Error("an action is already awaiting its ack");
    }
    this.pending = action;
    this.dragging = null;
  }

  get pendingAction(): BoardAction | null {
    return this.pending;
  }

  /**
   * Commit or discard the pending action per the server's verdict and
   * verify the mirror hash against the ack's state_hash.
   */
  applyAck(status: AckStatus, stateHash: string): AckResult {
    const action = this.pending;
    if (action === null) {
      throw new Error("no action awaiting an ack");
    }
    this.pending = null;
    let applied = false;
    if (status === "accepted") {
      if (action.action === "place") {
        this.board.set(action.building, {
          building: action.building,
          col: action.col,
          row: action.row,
          orientation: action.orientation ?? 0,
        });
      } else {
        this.board.delete(action.building);
      }
      applied = true;
    }
    // flagged and rejected events are not applied by the engine either,
    // so the mirror stays put in every branch but "accepted".
    const localHash = this.hash();
    return { applied, hashMatches: localHash === stateHash, localHash };
  }

  hash(): string {
    return configurationHash(this.board.values());
  }

  /** Reset to an empty board (trial advance). */
  clear(): void {
    this.board.clear();
    this.pending = null;
    this.dragging = null;
  }
}
