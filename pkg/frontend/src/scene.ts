/** Pure scene construction: snapshot + view state in, draw primitives out.
 * The canvas painter consumes the primitive list; tests consume it directly.
 */

import { EDGE_CSS, OWNERSHIP_CSS, TARGET_GHOST_CSS, ownership } from "./colors.js";
import type { ModelObj, StateMsg } from "./protocol.js";
import { Camera, Projected, project, v3 } from "./vec.js";

export interface CirclePrim {
  kind: "circle";
  id: number;
  x: number;
  y: number;
  r: number;
  fill: string;
  outline?: string;
}

export interface LinePrim {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  width: number;
}

export type Prim = CirclePrim | LinePrim;

export interface Scene {
  prims: Prim[]; // draw order: ghost, edges, vertices
  projected: Map<number, Projected>; // for picking
}

const VERTEX_RADIUS = 7;

function projectAll(
  positions: Map<number, [number, number, number]>,
  cam: Camera,
  width: number,
  height: number,
): Map<number, Projected> {
  const out = new Map<number, Projected>();
  for (const [id, [x, y, z]] of positions) {
    out.set(id, project(v3(x, y, z), cam, width, height));
  }
  return out;
}

function visible(p: Projected | undefined): p is Projected {
  return !!p && p.depth > 0 && Number.isFinite(p.x);
}

export function buildScene(
  snapshot: StateMsg,
  target: ModelObj,
  edges: [number, number][],
  viewer: 0 | 1,
  grabbedVertex: number | null,
  cam: Camera,
  width: number,
  height: number,
): Scene {
  const prims: Prim[] = [];

  // target ghost: semi-transparent wireframe to line the model up against
  const targetPos = new Map<number, [number, number, number]>(
    target.vertices.map((v) => [v.id, v.pos]),
  );
  const ghost = projectAll(targetPos, cam, width, height);
  for (const [a, b] of target.edges) {
    const pa = ghost.get(a);
    const pb = ghost.get(b);
    if (visible(pa) && visible(pb)) {
      prims.push({
        kind: "line",
        x1: pa.x, y1: pa.y, x2: pb.x, y2: pb.y,
        stroke: TARGET_GHOST_CSS,
        width: 5,
      });
    }
  }

  const positions = new Map<number, [number, number, number]>(
    Object.entries(snapshot.positions).map(([id, pos]) => [Number(id), pos]),
  );
  const projected = projectAll(positions, cam, width, height);
  for (const [a, b] of edges) {
    const pa = projected.get(a);
    const pb = projected.get(b);
    if (visible(pa) && visible(pb)) {
      prims.push({
        kind: "line",
        x1: pa.x, y1: pa.y, x2: pb.x, y2: pb.y,
        stroke: EDGE_CSS,
        width: 1.5,
      });
    }
  }

  // vertices on top, farther ones first so near ones overdraw
  const order = [...projected.entries()]
    .filter(([, p]) => visible(p))
    .sort((a, b) => b[1].depth - a[1].depth);
  for (const [id, p] of order) {
    prims.push({
      kind: "circle",
      id,
      x: p.x,
      y: p.y,
      r: id === grabbedVertex ? VERTEX_RADIUS + 3 : VERTEX_RADIUS,
      fill: OWNERSHIP_CSS[ownership(id, snapshot.selections, viewer)],
      outline: id === grabbedVertex ? "#222" : undefined,
    });
  }

  return { prims, projected };
}
