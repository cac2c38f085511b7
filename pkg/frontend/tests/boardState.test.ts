import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import {
  ClientBoardState,
  configurationHash,
  BoardAction,
} from "../src/boardState";
import { AckStatus, BUILDING_IDS } from "../src/protocol";

// Hash vectors captured from the engine's configuration_hash.
describe("configurationHash", () => {
  it("matches the engine on the empty board", () => {
    expect(configurationHash([])).toBe("811c9dc5");
  });

  it("matches the engine on known configurations", () => {
    expect(
      configurationHash([{ building: "B01", col: 2, row: 2, orientation: 0 }])
    ).toBe("0ad85202");
    expect(
      configurationHash([
        { building: "B02", col: 10, row: 4, orientation: 90 },
        { building: "B01", col: 2, row: 2, orientation: 0 },
      ])
    ).toBe("6bde5dec");
    expect(
      configurationHash([
        { building: "B10", col: 23, row: 15, orientation: 270 },
        { building: "B05", col: 0, row: 0, orientation: 0 },
        { building: "B07", col: 18, row: 10, orientation: 180 },
      ])
    ).toBe("af8fd021");
  });

  it("is order-independent (canonical sort by id)", () => {
    const a = [
      { building: "B03", col: 1, row: 1, orientation: 0 },
      { building: "B01", col: 5, row: 5, orientation: 90 },
    ];
    expect(configurationHash(a)).toBe(configurationHash([...a].reverse()));
  });
});

describe("ClientBoardState", () => {
  it("starts with the full palette and an empty board", () => {
    const state = new ClientBoardState();
    expect(state.palette).toEqual([...BUILDING_IDS]);
    expect(state.placements).toEqual([]);
    expect(state.hash()).toBe("811c9dc5");
  });

  it("palette and board always partition the ten buildings", () => {
    const state = new ClientBoardState();
    state.propose({ action: "place", building: "B04", col: 3, row: 3, orientation: 0 });
    state.applyAck("accepted", computeAfter(state));
    const union = new Set([...state.palette, ...state.placements.map((p) => p.building)]);
    expect(union.size).toBe(10);
    expect(state.palette).not.toContain("B04");
  });

  it("commits only on accepted acks; rejected leaves the board unchanged", () => {
    const state = new ClientBoardState();
    place(state, "B01", 2, 2, 0, "accepted");
    const before = state.hash();
    place(state, "B02", 6, 3, 0, "rejected"); // street cell
    expect(state.hash()).toBe(before);
    expect(state.palette).toContain("B02");
  });

  it("refuses to speculate past an unacknowledged action", () => {
    const state = new ClientBoardState();
    state.propose({ action: "place", building: "B01", col: 1, row: 1, orientation: 0 });
    expect(() =>
      state.propose({ action: "place", building: "B02", col: 2, row: 2, orientation: 0 })
    ).toThrow(/awaiting/);
  });

  it("reports a hash mismatch when the server disagrees", () => {
    const state = new ClientBoardState();
    state.propose({ action: "place", building: "B01", col: 1, row: 1, orientation: 0 });
    const result = state.applyAck("accepted", "deadbeef");
    expect(result.hashMatches).toBe(false);
  });

  it("[SECONDARY] mirror fidelity: scripted 20-action interaction matches the engine hash at every ack", () => {
    const fixture = JSON.parse(
      readFileSync(join(__dirname, "fixtures", "mirror_script.json"), "utf-8")
    ) as {
      steps: {
        send: BoardAction;
        ack: { status: AckStatus; state_hash: string };
      }[];
    };
    expect(fixture.steps).toHaveLength(20);
    const state = new ClientBoardState();
    for (const [i, step] of fixture.steps.entries()) {
      state.propose(step.send);
      const result = state.applyAck(step.ack.status, step.ack.state_hash);
      expect(result.hashMatches, `step ${i}: ${result.localHash} != ${step.ack.state_hash}`).toBe(true);
    }
  });
});

function place(
  state: ClientBoardState,
  building: string,
  col: number,
  row: number,
  orientation: number,
  status: AckStatus
): void {
  state.propose({ action: "place", building, col, row, orientation });
  // compute the expected post-ack hash locally; the point of these unit
  // tests is the commit/discard logic, not server agreement
  const probe = new ClientBoardState();
  for (const p of state.placements) {
    probe.propose({ action: "place", ...p });
    probe.applyAck("accepted", probe.hash());
  }
  if (status === "accepted") {
    probe.propose({ action: "place", building, col, row, orientation });
    probe.applyAck("accepted", probe.hash());
  }
  state.applyAck(status, probe.hash());
}

function computeAfter(state: ClientBoardState): string {
  const probe = new ClientBoardState();
  const pending = state.pendingAction!;
  for (const p of state.placements) {
    probe.propose({ action: "place", ...p });
    probe.applyAck("accepted", probe.hash());
  }
  probe.propose(pending);
  probe.applyAck("accepted", probe.hash());
  return probe.hash();
}
