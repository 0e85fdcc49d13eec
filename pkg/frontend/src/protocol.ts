/** Wire protocol types, mirroring the server's JSON messages. */

export type OpName = "translate" | "rotate" | "scale";

export interface ModelObj {
  vertices: { id: number; pos: [number, number, number] }[];
  edges: [number, number][];
  faces: number[][];
}

export interface Welcome {
  type: "welcome";
  user_id: 0 | 1;
  model: ModelObj;
  target: ModelObj;
  strategy: string;
}

export interface StateMsg {
  type: "state";
  tick: number;
  positions: Record<string, [number, number, number]>;
  selections: Record<string, number[]>;
  active_ops: Record<string, OpName | null>;
}

export interface Deny {
  type: "deny";
  reason: string;
  seq?: number;
}

export interface MatchResult {
  type: "match_result";
  matched: boolean;
  max_error_m: number;
}

export type ServerMsg =
  | Welcome
  | StateMsg
  | Deny
  | MatchResult
  | { type: "peer_left" }
  | { type: "error"; message: string };

export type ClientMsg =
  | { type: "join"; name: string }
  | { type: "select"; vertex: number }
  | { type: "deselect"; vertex: number }
  | { type: "confirm_group" }
  | { type: "cancel_group" }
  | { type: "set_op"; op: OpName }
  | { type: "grab"; vertex: number; handle: [number, number, number] }
  | { type: "move"; handle: [number, number, number] }
  | { type: "release" }
  | { type: "match_check" };

export function parseServerMsg(raw: string): ServerMsg | null {
  try {
    const msg = JSON.parse(raw);
    if (msg && typeof msg.type === "string") return msg as ServerMsg;
  } catch {
    /* ignore unparsable frames */
  }
  return null;
}

export const DENY_TEXT: Record<string, string> = {
  olr_locked: "Those vertices are locked by your partner.",
  alr_same_op: "Your partner is already applying this operation to shared vertices — switch to a different one.",
  degenerate_pivot: "That vertex is too close to the group's pivot to rotate or scale.",
  no_group: "Confirm a vertex group first.",
  bad_vertex: "That vertex is not part of your group.",
  session_full: "The session already has two users.",
};
