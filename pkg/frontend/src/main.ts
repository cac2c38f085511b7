/**
 * Page entry point. Configuration comes from the query string:
 *   ?url=ws://host:port/ws&token=SESSION&role=participant|assessor
 */

import { AssessorView } from "./assessor";
import { ParticipantView } from "./participant";
import { Role, ServerMessage } from "./protocol";
import { connect } from "./wsClient";

export async function boot(root: HTMLElement, search: string): Promise<void> {
  const params = new URLSearchParams(search);
  const base = params.get("url") ?? "ws://127.0.0.1:8321/ws";
  const token = params.get("token");
  const role = (params.get("role") ?? "participant") as Role;
  if (!token) {
    root.textContent = "Missing session token (?token=...).";
    return;
  }

  let view: { handleServerMessage: (m: ServerMessage) => void } | null = null;
  const client = await connect(
    `${base}?token=${encodeURIComponent(token)}`,
    (message) => view?.handleServerMessage(message)
  );
  if (role === "assessor") {
    view = new AssessorView(root, client);
  } else {
    const participant = new ParticipantView(root, client);
    view = participant;
    await client.send("join", {
      role,
      participant: params.get("participant") ?? "anonymous",
      group: params.get("group") ?? "young",
    });
    await participant.startTrial();
    return;
  }
  await client.send("join", { role });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(document.getElementById("app")!, window.location.search);
}
