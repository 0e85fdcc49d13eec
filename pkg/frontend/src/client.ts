/** WebSocket session wiring: connect, join, route server messages into the
 * view state, surface denials and match results as notices. */

import type { ClientMsg, ModelObj, ServerMsg, Welcome } from "./protocol.js";
import { DENY_TEXT, parseServerMsg } from "./protocol.js";
import type { ViewState } from "./input.js";

export interface Notice {
  text: string;
  tone: "info" | "warn" | "success";
}

/** Human-readable notice for a server message, if it warrants one. */
export function noticeFor(msg: ServerMsg): Notice | null {
  switch (msg.type) {
    case "deny":
      return { text: DENY_TEXT[msg.reason] ?? `Denied: ${msg.reason}`, tone: "warn" };
    case "match_result":
      return msg.matched
        ? { text: "Match!", tone: "success" }
        : {
            text: `Not match — worst vertex off by ${(msg.max_error_m * 100).toFixed(1)} cm`,
            tone: "warn",
          };
    case "peer_left":
      return { text: "Your partner left the session.", tone: "info" };
    case "error":
      return { text: `Protocol error: ${msg.message}`, tone: "warn" };
    default:
      return null;
  }
}

export interface SessionHooks {
  onWelcome(welcome: Welcome): void;
  onViewChanged(): void;
  onNotice(notice: Notice): void;
  onDisconnected(): void;
}

export class SessionClient {
  private socket: WebSocket;
  model: ModelObj | null = null;
  target: ModelObj | null = null;
  strategy = "";
  connected = false;

  constructor(
    url: string,
    private name: string,
    private view: ViewState,
    private hooks: SessionHooks,
  ) {
    this.socket = new WebSocket(url);
    this.socket.onopen = () => {
      this.connected = true;
      this.send({ type: "join", name: this.name });
    };
    this.socket.onmessage = (event) => this.handle(String(event.data));
    this.socket.onclose = () => {
      this.connected = false;
      this.hooks.onDisconnected();
    };
    this.socket.onerror = () => {
      this.connected = false;
      this.hooks.onDisconnected();
    };
  }

  send(msg: ClientMsg): void {
    if (this.connected && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(msg));
    }
  }

  sendAll(messages: ClientMsg[]): void {
    for (const msg of messages) this.send(msg);
  }

  private handle(raw: string): void {
    const msg = parseServerMsg(raw);
    if (!msg) return;
    if (msg.type === "welcome") {
      this.view.userId = msg.user_id;
      this.model = msg.model;
      this.target = msg.target;
      this.strategy = msg.strategy;
      this.hooks.onWelcome(msg);
    } else if (msg.type === "state") {
      this.view.snapshot = msg;
      this.hooks.onViewChanged();
    }
    const notice = noticeFor(msg);
    if (notice) this.hooks.onNotice(notice);
  }
}
