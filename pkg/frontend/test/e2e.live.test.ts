/** End-to-end against the real Python server: two protocol clients play a
 * session, the client-side color rules are checked on live snapshots, a
 * deny surfaces as a notice, and a full match task completes.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { noticeFor } from "../src/client.js";
import { ownership } from "../src/colors.js";
import type { ModelObj, ServerMsg, StateMsg } from "../src/protocol.js";

const REPO_ROOT = join(__dirname, "..", "..");

class TestClient {
  socket: WebSocket;
  inbox: ServerMsg[] = [];
  userId: 0 | 1 = 0;
  private outbox: string[] = [];
  private open = false;

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.on("open", () => {
      this.open = true;
      for (const raw of this.outbox) this.socket.send(raw);
      this.outbox = [];
    });
    this.socket.on("message", (data) => {
      const msg = JSON.parse(String(data)) as ServerMsg;
      this.inbox.push(msg);
    });
  }

  send(msg: unknown): void {
    const raw = JSON.stringify(msg);
    if (this.open) {
      this.socket.send(raw);
    } else {
      this.outbox.push(raw);
    }
  }

  async until<T extends ServerMsg>(pred: (msg: ServerMsg) => msg is T, timeoutMs = 8000): Promise<T>;
  async until(pred: (msg: ServerMsg) => boolean, timeoutMs?: number): Promise<ServerMsg>;
  async until(pred: (msg: ServerMsg) => boolean, timeoutMs = 8000): Promise<ServerMsg> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
      const found = this.inbox.find(pred);
      if (found) {
        this.inbox = this.inbox.filter((m) => m !== found);
        return found;
      }
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
    throw new Error("timed out waiting for a server message");
  }

  close(): void {
    this.socket.close();
  }
}

describe("live server end to end", () => {
  let server: ChildProcess;
  let url = "";
  let workDir = "";

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "cowire-e2e-"));
    const gen = spawnSync(
      "python3",
      ["-m", "cowire.cli", "gen", "--seed", "5", "--faces", "2", "--ops", "2",
        "--out", join(workDir, "model.json"), "--target", join(workDir, "target.json")],
      { cwd: REPO_ROOT, encoding: "utf-8" },
    );
    expect(gen.status, gen.stderr).toBe(0);

    server = spawn(
      "python3",
      ["-m", "cowire.cli", "serve", "--port", "0", "--strategy", "averaging",
        "--model", join(workDir, "model.json"), "--target", join(workDir, "target.json"),
        "--log", join(workDir, "events.jsonl"), "--tick-hz", "30"],
      { cwd: REPO_ROOT },
    );
    url = await new Promise<string>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("server did not start")), 10000);
      server.stdout!.on("data", (chunk: Buffer) => {
        const match = String(chunk).match(/listening on (ws:\/\/\S+)/);
        if (match) {
          clearTimeout(timer);
          resolve(match[1]!);
        }
      });
      server.stderr!.on("data", (chunk: Buffer) => process.stderr.write(chunk));
    });
  }, 20000);

  afterAll(() => {
    server?.kill("SIGTERM");
  });

  it("runs the overlap pattern, a deny, and a full match task", async () => {
    const a = new TestClient(url);
    const b = new TestClient(url);
    a.send({ type: "join", name: "left-tab" });
    b.send({ type: "join", name: "right-tab" });
    const welcomeA = await a.until((m): m is Extract<ServerMsg, { type: "welcome" }> => m.type === "welcome");
    const welcomeB = await b.until((m): m is Extract<ServerMsg, { type: "welcome" }> => m.type === "welcome");
    expect(welcomeA.user_id).toBe(0);
    expect(welcomeB.user_id).toBe(1);
    expect(welcomeA.strategy).toBe("averaging");

    // canonical overlap pattern: {0,1,2,3} vs {2,3,4,5}
    for (const v of [0, 1, 2, 3]) a.send({ type: "select", vertex: v });
    for (const v of [2, 3, 4, 5]) b.send({ type: "select", vertex: v });
    const isFullSelection = (m: ServerMsg): m is StateMsg =>
      m.type === "state" &&
      m.selections["0"].length === 4 &&
      m.selections["1"].length === 4;
    const stateA = await a.until(isFullSelection);
    const stateB = await b.until(isFullSelection);

    // both screens agree: joint vertices shared (purple), others egocentric
    for (const [state, viewer] of [[stateA, 0], [stateB, 1]] as const) {
      expect(ownership(2, state.selections, viewer)).toBe("shared");
      expect(ownership(3, state.selections, viewer)).toBe("shared");
      expect(ownership(7, state.selections, viewer)).toBe("available");
    }
    expect(ownership(0, stateA.selections, 0)).toBe("mine");
    expect(ownership(0, stateB.selections, 1)).toBe("partner");
    expect(ownership(5, stateA.selections, 0)).toBe("partner");
    expect(ownership(5, stateB.selections, 1)).toBe("mine");

    // a denial surfaces as a visible notice
    b.send({ type: "cancel_group" });
    b.send({ type: "confirm_group" }); // nothing pending anymore
    const deny = await b.until((m) => m.type === "deny");
    const notice = noticeFor(deny)!;
    expect(notice.tone).toBe("warn");
    expect(notice.text.length).toBeGreaterThan(0);

    // solve the whole task: move every vertex onto the target, then match
    a.send({ type: "cancel_group" });
    const model = welcomeA.model as ModelObj;
    const target = JSON.parse(
      readFileSync(join(workDir, "target.json"), "utf-8"),
    ) as ModelObj;
    const targetPos = new Map(target.vertices.map((v) => [v.id, v.pos]));
    for (const vertex of model.vertices) {
      const client = vertex.id % 2 === 0 ? a : b;
      const want = targetPos.get(vertex.id)!;
      const delta: [number, number, number] = [
        want[0] - vertex.pos[0],
        want[1] - vertex.pos[1],
        want[2] - vertex.pos[2],
      ];
      client.send({ type: "select", vertex: vertex.id });
      client.send({ type: "confirm_group" });
      client.send({ type: "grab", vertex: vertex.id, handle: [0, 0, 0] });
      client.send({ type: "move", handle: delta });
      // the sample lands on the next 30 Hz tick; wait for it before releasing
      await client.until(
        (m) =>
          m.type === "state" &&
          Math.hypot(
            m.positions[String(vertex.id)][0] - want[0],
            m.positions[String(vertex.id)][1] - want[1],
            m.positions[String(vertex.id)][2] - want[2],
          ) < 1e-9,
      );
      client.send({ type: "release" });
      client.send({ type: "cancel_group" });
    }
    a.send({ type: "match_check" });
    const result = await a.until((m) => m.type === "match_result");
    expect(result.type === "match_result" && result.matched).toBe(true);
    expect(noticeFor(result)!.text).toBe("Match!");

    a.close();
    b.close();
  }, 60000);
});
