import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { MESSAGE_SCHEMA } from "../src/protocol";
import { ProtocolClient } from "../src/wsClient";
import { ServerMessage } from "../src/protocol";

describe("protocol schema", () => {
  it("matches the service's /schema descriptor exactly", () => {
    const served = JSON.parse(
      readFileSync(join(__dirname, "fixtures", "schema.json"), "utf-8")
    );
    // deep-normalize the readonly constant for comparison
    expect(JSON.parse(JSON.stringify(MESSAGE_SCHEMA))).toEqual(served);
  });
});

describe("ProtocolClient sequencing", () => {
  function makeClient() {
    const sent: { kind: string; seq: number }[] = [];
    const pushed: ServerMessage[] = [];
    const client = new ProtocolClient(
      { send: (d) => sent.push(JSON.parse(d)), close: () => {} },
      (m) => pushed.push(m)
    );
    return { client, sent, pushed };
  }

  it("assigns strictly increasing seq numbers", () => {
    const { client, sent } = makeClient();
    void client.send("join", { role: "participant" });
    void client.send("tour_ready");
    void client.send("done");
    expect(sent.map((m) => m.seq)).toEqual([1, 2, 3]);
  });

  it("resolves the matching promise on a re-paired reply", async () => {
    const { client } = makeClient();
    const p1 = client.send("tour_ready");
    const p2 = client.send("done");
    client.handleFrame(JSON.stringify({ kind: "phase", phase: "done", seq: 10, re: 2 }));
    client.handleFrame(JSON.stringify({ kind: "phase", phase: "viewing", seq: 11, re: 1 }));
    expect((await p1).phase).toBe("viewing");
    expect((await p2).phase).toBe("done");
  });

  it("routes broadcasts (no matching re) to the event handler", () => {
    const { client, pushed } = makeClient();
    client.handleFrame(
      JSON.stringify({ kind: "session_complete", status: "complete", seq: -1 })
    );
    expect(pushed).toHaveLength(1);
    expect(pushed[0].kind).toBe("session_complete");
  });

  it("rejects outstanding sends when the connection closes", async () => {
    const { client } = makeClient();
    const p = client.send("done");
    client.close();
    await expect(p).rejects.toThrow(/closed/);
  });
});
