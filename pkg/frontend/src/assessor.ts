/**
 * Assessor console: pending corrections, trial scores, advancement.
 *
 * This is the only view that ever renders scores or target-related
 * information; it is served on a separate connection with the assessor
 * role and is never combined with the participant view in one page.
 */

import { BUILDING_IDS, BUILDING_LABELS, ServerMessage } from "./protocol";
import { ProtocolClient } from "./wsClient";

export class AssessorView {
  readonly root: HTMLElement;
  private client: ProtocolClient;
  private correctionsEl: HTMLElement;
  private scoresEl: HTMLElement;
  private statusEl: HTMLElement;

  constructor(root: HTMLElement, client: ProtocolClient) {
    this.root = root;
    this.client = client;
    root.innerHTML = "";
    root.classList.add("assessor-view");

    this.statusEl = el("div", "status");
    this.correctionsEl = el("div", "corrections");
    this.scoresEl = el("table", "scores");
    const header = document.createElement("tr");
    for (const col of [
      "trial",
      "number",
      "difference",
      "distance",
      "orient",
      "interbuilding",
      "similarity",
      "totalTime_s",
      "dSim_per_s",
    ]) {
      const th = document.createElement("th");
      th.textContent = col;
      header.append(th);
    }
    this.scoresEl.append(header);

    const advance = el("button", "advance-button") as HTMLButtonElement;
    advance.textContent = "Advance to next trial";
    advance.addEventListener("click", () => {
      void this.client.send("advance");
    });
    const abort = el("button", "abort-button") as HTMLButtonElement;
    abort.textContent = "Abort session";
    abort.addEventListener("click", () => {
      void this.client.send("abort");
    });

    root.append(this.statusEl, this.correctionsEl, this.scoresEl, advance, abort);
  }

  handleServerMessage(message: ServerMessage): void {
    switch (message.kind) {
      case "trial_start":
        this.statusEl.textContent = `Trial ${message.index} (${message.trial_kind}, ${message.num_buildings} buildings)`;
        break;
      case "phase":
        this.statusEl.textContent = `Phase: ${message.phase}`;
        break;
      case "correction_needed":
        this.addCorrection(String(message.event_id));
        break;
      case "trial_score":
        this.addScoreRow(message.report as Record<string, unknown>);
        break;
      case "session_complete":
        this.statusEl.textContent = `Session ${message.status}`;
        break;
      case "error":
        this.statusEl.textContent = `Error: ${message.detail ?? message.code}`;
        break;
    }
  }

  private addCorrection(eventId: string): void {
    const row = el("div", "correction-item");
    row.dataset.eventId = eventId;
    const label = el("span", "correction-label");
    label.textContent = `Unidentified model in event ${eventId}:`;
    const picker = document.createElement("select");
    for (const id of BUILDING_IDS) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = `${id} ${BUILDING_LABELS[id].label}`;
      picker.append(option);
    }
    const button = document.createElement("button");
    button.textContent = "Resolve";
    button.addEventListener("click", () => {
      void this.resolve(eventId, picker.value).then(
        () => row.remove(),
        (err: Error) => {
          // conflict: leave the row for a retry with a different pick
          label.textContent = `Event ${eventId}: ${err.message} — try again:`;
        }
      );
    });
    row.append(label, picker, button);
    this.correctionsEl.append(row);
  }

  async resolve(eventId: string, building: string): Promise<void> {
    const reply = await this.client.send("resolve", {
      event_id: eventId,
      building,
    });
    if (reply.kind === "error") {
      throw new Error(String(reply.detail ?? reply.code));
    }
  }

  private addScoreRow(report: Record<string, unknown>): void {
    const tr = document.createElement("tr");
    for (const key of [
      "trial",
      "number",
      "difference",
      "distance",
      "orient",
      "interbuilding",
      "similarity",
      "totalTime_s",
      "dSim_per_s",
    ]) {
      const td = document.createElement("td");
      const value = report[key];
      td.textContent =
        value === null || value === undefined
          ? "—"
          : typeof value === "number" && key !== "trial"
            ? value.toFixed(4)
            : String(value);
      tr.append(td);
    }
    this.scoresEl.append(tr);
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
