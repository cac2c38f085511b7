/**
 * Participant view: tour playback, then the interactive board.
 *
 * The participant sees only the tour, the palette, the board grid, a
 * north indicator, and a done button. Scores and target-map data never
 * reach this view: trial_score messages are dropped on arrival, and
 * rejections show a neutral notice with no correctness information.
 */

import { ClientBoardState } from "./boardState";
import {
  BUILDING_LABELS,
  defaultStreetMask,
  EventAck,
  GRID_COLUMNS,
  GRID_ROWS,
  ORIENTATIONS,
  ServerMessage,
  TourData,
  Waypoint,
} from "./protocol";
import { ProtocolClient } from "./wsClient";
import { CameraFrame, TourPlayer } from "./tour";

const NEUTRAL_REJECTION_NOTICE = "That spot is not available. Try another slot.";

export class ParticipantView {
  readonly root: HTMLElement;
  readonly state: ClientBoardState;
  private client: ProtocolClient;
  private streetMask = defaultStreetMask();
  private tour: TourPlayer | null = null;
  phase = "viewing_pending";
  private tourViewport: HTMLElement;
  private boardSection: HTMLElement;
  private paletteEl: HTMLElement;
  private gridEl: HTMLElement;
  private noticeEl: HTMLElement;
  private northEl: HTMLElement;
  private selectedOrientation = 0;

  constructor(root: HTMLElement, client: ProtocolClient) {
    this.root = root;
    this.client = client;
    this.state = new ClientBoardState();
    root.innerHTML = "";
    root.classList.add("participant-view");

    this.tourViewport = el("div", "tour-viewport");
    this.boardSection = el("div", "board-section");
    this.boardSection.hidden = true;
    this.paletteEl = el("div", "palette");
    this.gridEl = el("div", "grid");
    this.noticeEl = el("div", "notice");
    this.noticeEl.setAttribute("role", "status");
    this.northEl = el("div", "north-indicator");
    this.northEl.textContent = "N";

    const doneButton = el("button", "done-button") as HTMLButtonElement;
    doneButton.textContent = "I am done";
    doneButton.addEventListener("click", () => {
      void this.client.send("done");
    });

    this.boardSection.append(
      this.northEl,
      this.paletteEl,
      this.gridEl,
      this.noticeEl,
      doneButton
    );
    root.append(this.tourViewport, this.boardSection);
    this.buildGrid();
    this.renderPalette();
  }

  /** Route a pushed (non-reply) server message. */
  handleServerMessage(message: ServerMessage): void {
    switch (message.kind) {
      case "phase":
        this.setPhase(String(message.phase));
        break;
      case "trial_start":
        this.state.clear();
        this.setPhase("viewing_pending");
        this.renderBoard();
        this.renderPalette();
        break;
      case "tour_data": {
        const data = message as TourData;
        if (data.waypoints) this.playTour(data.waypoints, data.north_heading ?? 0);
        break;
      }
      case "trial_score":
        // scores are assessor-only; never rendered here
        break;
      case "session_complete":
        this.tourViewport.textContent = "Session complete. Thank you.";
        this.boardSection.hidden = true;
        break;
      case "error":
        // engine-phase errors surface as the same neutral notice
        this.noticeEl.textContent = NEUTRAL_REJECTION_NOTICE;
        break;
    }
  }

  async startTrial(): Promise<void> {
    await this.client.send("tour_ready");
  }

  private setPhase(phase: string): void {
    this.phase = phase;
    const construction = phase === "construction" || phase === "done";
    // the neighborhood display turns off before construction begins
    this.tourViewport.hidden = construction;
    if (construction) this.tourViewport.innerHTML = "";
    this.boardSection.hidden = !construction;
  }

  private playTour(waypoints: Waypoint[], northHeading: number): void {
    this.state.northHeading = northHeading;
    this.northEl.style.transform = `rotate(${northHeading}deg)`;
    let tour: TourPlayer;
    try {
      tour = new TourPlayer(waypoints, {
        onFrame: (frame) => this.renderTourFrame(frame),
        onComplete: () => {
          void this.client.send("tour_complete");
        },
      });
    } catch (err) {
      this.tourViewport.textContent = "The tour could not be played.";
      return;
    }
    this.tour = tour;
    tour.start();
  }

  async pauseTour(): Promise<void> {
    if (!this.tour) return;
    const panorama = this.tour.pause();
    await this.client.send("tour_pause", {
      waypoint_index: panorama.waypoint_index,
    });
  }

  async resumeTour(): Promise<void> {
    if (!this.tour) return;
    await this.client.send("tour_resume");
    this.tour.resume();
  }

  private renderTourFrame(frame: CameraFrame): void {
    this.tourViewport.dataset.x = String(frame.x);
    this.tourViewport.dataset.y = String(frame.y);
    this.tourViewport.dataset.heading = String(frame.heading);
    this.tourViewport.classList.toggle("panorama", frame.panorama);
  }

  setOrientation(orientation: number): void {
    if (!ORIENTATIONS.includes(orientation as 0 | 90 | 180 | 270)) {
      throw new Error(`orientation must be one of ${ORIENTATIONS.join(", ")}`);
    }
    this.selectedOrientation = orientation;
  }

  /** Drag a palette model onto a slot; commits only on the ack. */
  async dropOnSlot(building: string, col: number, row: number): Promise<EventAck> {
    this.state.beginDrag(building);
    this.state.propose({
      action: "place",
      building,
      col,
      row,
      orientation: this.selectedOrientation,
    });
    const reply = await this.client.send("board_event", {
      action: "place",
      building,
      col,
      row,
      orientation: this.selectedOrientation,
    });
    return this.settleAck(reply);
  }

  /** Remove a placed building back to the palette. */
  async removeFromBoard(building: string): Promise<EventAck> {
    const placement = this.state.get(building);
    if (!placement) throw new Error(`${building} is not on the board`);
    this.state.propose({
      action: "remove",
      building,
      col: placement.col,
      row: placement.row,
      orientation: null,
    });
    const reply = await this.client.send("board_event", {
      action: "remove",
      building,
      col: placement.col,
      row: placement.row,
      orientation: null,
    });
    return this.settleAck(reply);
  }

  /** Rotation is a remove+place pair at the same slot. */
  async rotate(building: string, orientation: number): Promise<EventAck> {
    const placement = this.state.get(building);
    if (!placement) throw new Error(`${building} is not on the board`);
    const { col, row } = placement;
    await this.removeFromBoard(building);
    const previous = this.selectedOrientation;
    this.setOrientation(orientation);
    try {
      return await this.dropOnSlot(building, col, row);
    } finally {
      this.selectedOrientation = previous;
    }
  }

  private settleAck(reply: ServerMessage): EventAck {
    if (reply.kind === "error") {
      // the engine refused to record at all (wrong phase etc.)
      this.state.applyAck("rejected", this.state.hash());
      this.noticeEl.textContent = NEUTRAL_REJECTION_NOTICE;
      this.renderBoard();
      this.renderPalette();
      throw new Error(String(reply.detail ?? reply.code));
    }
    const ack = reply as EventAck;
    const result = this.state.applyAck(ack.status, ack.state_hash);
    if (!result.hashMatches) {
      throw new Error(
        `board mirror diverged: local ${result.localHash}, engine ${ack.state_hash}`
      );
    }
    if (ack.status === "rejected") {
      this.noticeEl.textContent = NEUTRAL_REJECTION_NOTICE;
    } else {
      this.noticeEl.textContent = "";
    }
    this.renderBoard();
    this.renderPalette();
    return ack;
  }

  private buildGrid(): void {
    this.gridEl.innerHTML = "";
    for (let row = 0; row < GRID_ROWS; row++) {
      for (let col = 0; col < GRID_COLUMNS; col++) {
        const cell = el("div", "cell");
        cell.dataset.col = String(col);
        cell.dataset.row = String(row);
        if (this.streetMask.has(`${col},${row}`)) cell.classList.add("street");
        this.gridEl.append(cell);
      }
    }
  }

  private renderBoard(): void {
    for (const cell of this.gridEl.querySelectorAll<HTMLElement>(".cell")) {
      cell.innerHTML = "";
    }
    for (const p of this.state.placements) {
      const cell = this.gridEl.querySelector<HTMLElement>(
        `.cell[data-col="${p.col}"][data-row="${p.row}"]`
      );
      if (!cell) continue;
      const model = el("div", "model");
      const meta = BUILDING_LABELS[p.building];
      model.textContent = meta ? meta.label : p.building;
      model.dataset.building = p.building;
      model.style.background = meta ? meta.color : "gray";
      model.style.transform = `rotate(${p.orientation}deg)`;
      cell.append(model);
    }
  }

  private renderPalette(): void {
    this.paletteEl.innerHTML = "";
    for (const building of this.state.palette) {
      const item = el("button", "palette-item");
      const meta = BUILDING_LABELS[building];
      item.textContent = meta ? meta.label : building;
      item.dataset.building = building;
      item.style.background = meta ? meta.color : "gray";
      this.paletteEl.append(item);
    }
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
