/** Pointer-to-protocol translation.
 *
 * Left click toggles select/deselect; dragging a vertex of the confirmed
 * group emits grab + a per-frame coalesced move stream + release; dragging
 * empty space orbits the camera. No grab is ever emitted without a
 * confirmed group. The server stays authoritative: geometry is never
 * predicted locally.
 */

import type { ClientMsg, StateMsg } from "./protocol.js";
import { Camera, Projected, V3, dragPlanePoint, pickVertex, v3 } from "./vec.js";

export interface DragState {
  vertex: number;
  anchor: V3; // world point of the grabbed vertex at grab time
  lastHandle: V3;
  pendingHandle: V3 | null; // newest pointer sample, flushed once per frame
  moved: boolean;
}

export interface ViewState {
  userId: 0 | 1;
  snapshot: StateMsg | null;
  /** local mirror of the confirmed group; set on Confirm, cleared on Cancel */
  groupIds: Set<number>;
  drag: DragState | null;
  orbit: { lastX: number; lastY: number } | null;
}

export function newViewState(userId: 0 | 1): ViewState {
  return { userId, snapshot: null, groupIds: new Set(), drag: null, orbit: null };
}

const vecOf = (t: [number, number, number]): V3 => v3(t[0], t[1], t[2]);
const tupleOf = (p: V3): [number, number, number] => [p.x, p.y, p.z];

export function mySelection(view: ViewState): number[] {
  return view.snapshot?.selections[String(view.userId)] ?? [];
}

export interface PointerDownResult {
  messages: ClientMsg[];
  pickedVertex: number | null;
}

export function onPointerDown(
  view: ViewState,
  px: number,
  py: number,
  projected: Map<number, Projected>,
  cam: Camera,
  width: number,
  height: number,
): PointerDownResult {
  const picked = pickVertex(px, py, projected);
  if (picked === null) {
    view.orbit = { lastX: px, lastY: py };
    return { messages: [], pickedVertex: null };
  }
  if (view.groupIds.has(picked) && view.snapshot) {
    const pos = view.snapshot.positions[String(picked)];
    if (pos) {
      const anchor = vecOf(pos);
      view.drag = { vertex: picked, anchor, lastHandle: anchor, pendingHandle: null, moved: false };
      return {
        messages: [{ type: "grab", vertex: picked, handle: tupleOf(anchor) }],
        pickedVertex: picked,
      };
    }
  }
  // plain click: toggle membership in my pending selection
  const msg: ClientMsg = mySelection(view).includes(picked)
    ? { type: "deselect", vertex: picked }
    : { type: "select", vertex: picked };
  return { messages: [msg], pickedVertex: picked };
}

/** Buffers the newest drag sample or orbits the camera; emits nothing. */
export function onPointerMove(
  view: ViewState,
  px: number,
  py: number,
  cam: Camera,
  width: number,
  height: number,
): void {
  if (view.drag) {
    const handle = dragPlanePoint(px, py, view.drag.anchor, cam, width, height);
    if (handle) {
      view.drag.pendingHandle = handle;
      view.drag.moved = true;
    }
    return;
  }
  if (view.orbit) {
    cam.yaw -= (px - view.orbit.lastX) * 0.008;
    cam.pitch = Math.min(
      1.45,
      Math.max(-1.45, cam.pitch + (py - view.orbit.lastY) * 0.008),
    );
    view.orbit = { lastX: px, lastY: py };
  }
}

/** At most one move per animation frame, whatever the pointer event rate. */
export function flushPendingMove(view: ViewState): ClientMsg[] {
  const drag = view.drag;
  if (!drag || !drag.pendingHandle) return [];
  const handle = drag.pendingHandle;
  drag.pendingHandle = null;
  drag.lastHandle = handle;
  return [{ type: "move", handle: tupleOf(handle) }];
}

export function onPointerUp(view: ViewState): ClientMsg[] {
  view.orbit = null;
  if (!view.drag) return [];
  const messages: ClientMsg[] = [];
  const pending = flushPendingMove(view);
  messages.push(...pending);
  messages.push({ type: "release" });
  view.drag = null;
  return messages;
}

export function onConfirmGroup(view: ViewState): ClientMsg[] {
  const selection = mySelection(view);
  if (selection.length === 0) return [];
  view.groupIds = new Set(selection);
  return [{ type: "confirm_group" }];
}

export function onCancelGroup(view: ViewState): ClientMsg[] {
  view.groupIds = new Set();
  view.drag = null;
  return [{ type: "cancel_group" }];
}
