/**
 * Sequenced protocol client.
 *
 * Outgoing messages get a strictly increasing seq; direct replies carry
 * that seq back as "re" and resolve the matching promise. Messages
 * without a pending "re" (broadcasts, pushes) go to the event handler.
 */

import { ClientMessage, ServerMessage } from "./protocol";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
}

export type EventHandler = (message: ServerMessage) => void;

export class ProtocolClient {
  private seq = 0;
  private pending = new Map<
    number,
    { resolve: (msg: ServerMessage) => void; reject: (err: Error) => void }
  >();

  constructor(
    private socket: WebSocketLike,
    private onEvent: EventHandler
  ) {}

  /** Send one message and resolve with the server's direct reply. */
  send(kind: string, fields: Record<string, unknown> = {}): Promise<ServerMessage> {
    const seq = ++this.seq;
    const message: ClientMessage = { kind, seq, ...fields };
    const promise = new Promise<ServerMessage>((resolve, reject) => {
      this.pending.set(seq, { resolve, reject });
    });
    this.socket.send(JSON.stringify(message));
    return promise;
  }

  /** Feed one raw frame from the socket. */
  handleFrame(raw: string): void {
    let message: ServerMessage;
    try {
      message = JSON.parse(raw);
    } catch {
      this.onEvent({ kind: "error", seq: -1, code: "protocol", detail: "unparseable frame" });
      return;
    }
    const re = message.re;
    if (typeof re === "number" && this.pending.has(re)) {
      const waiter = this.pending.get(re)!;
      this.pending.delete(re);
      waiter.resolve(message);
      // server errors still resolve the promise; callers inspect kind.
    }
    this.onEvent(message);
  }

  close(): void {
    for (const waiter of this.pending.values()) {
      waiter.reject(new Error("connection closed"));
    }
    this.pending.clear();
    this.socket.close();
  }
}

/** Adapt a browser WebSocket to the client; separate for testability. */
export function connect(
  url: string,
  onEvent: EventHandler,
  WebSocketImpl: { new (url: string): WebSocket } = WebSocket
): Promise<ProtocolClient> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocketImpl(url);
    const client = new ProtocolClient(
      { send: (d) => ws.send(d), close: () => ws.close() },
      onEvent
    );
    ws.onmessage = (ev) => client.handleFrame(String(ev.data));
    ws.onopen = () => resolve(client);
    ws.onerror = () => reject(new Error(`cannot connect to ${url}`));
  });
}
