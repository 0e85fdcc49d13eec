import { describe, expect, it } from "vitest";

import { OWNERSHIP_CSS, TARGET_GHOST_CSS } from "../src/colors.js";
import type { ModelObj, StateMsg } from "../src/protocol.js";
import { buildScene, CirclePrim } from "../src/scene.js";
import { defaultCamera } from "../src/vec.js";

const W = 800;
const H = 600;

function cubeModel(): ModelObj {
  const vertices = [];
  for (let i = 0; i < 8; i++) {
    vertices.push({
      id: i,
      pos: [i & 1, (i >> 1) & 1, (i >> 2) & 1] as [number, number, number],
    });
  }
  const edges: [number, number][] = [
    [0, 1], [1, 3], [3, 2], [2, 0],
    [4, 5], [5, 7], [7, 6], [6, 4],
    [0, 4], [1, 5], [2, 6], [3, 7],
  ];
  return { vertices, edges, faces: [] };
}

function snapshot(selections: Record<string, number[]>): StateMsg {
  const positions: Record<string, [number, number, number]> = {};
  for (const v of cubeModel().vertices) positions[String(v.id)] = v.pos;
  return {
    type: "state",
    tick: 1,
    positions,
    selections,
    active_ops: { "0": null, "1": null },
  };
}

function circles(selections: Record<string, number[]>, viewer: 0 | 1, grabbed: number | null = null) {
  const model = cubeModel();
  const scene = buildScene(snapshot(selections), model, model.edges, viewer, grabbed, defaultCamera(), W, H);
  const out = new Map<number, CirclePrim>();
  for (const prim of scene.prims) {
    if (prim.kind === "circle") out.set(prim.id, prim);
  }
  return { scene, circles: out };
}

describe("buildScene", () => {
  it("renders a fresh session entirely light blue", () => {
    const { circles: cs } = circles({ "0": [], "1": [] }, 0);
    expect(cs.size).toBe(8);
    for (const c of cs.values()) expect(c.fill).toBe(OWNERSHIP_CSS.available);
  });

  it("shows joint vertices purple on both screens", () => {
    const selections = { "0": [0, 1, 2, 3], "1": [2, 3, 4, 5] };
    for (const viewer of [0, 1] as const) {
      const { circles: cs } = circles(selections, viewer);
      expect(cs.get(2)!.fill).toBe(OWNERSHIP_CSS.shared);
      expect(cs.get(3)!.fill).toBe(OWNERSHIP_CSS.shared);
    }
  });

  it("shows a partner-only selection red on my screen, dark blue on theirs", () => {
    const selections = { "0": [], "1": [6] };
    expect(circles(selections, 0).circles.get(6)!.fill).toBe(OWNERSHIP_CSS.partner);
    expect(circles(selections, 1).circles.get(6)!.fill).toBe(OWNERSHIP_CSS.mine);
  });

  it("ghosts the target wireframe", () => {
    const model = cubeModel();
    const scene = buildScene(snapshot({ "0": [], "1": [] }), model, model.edges, 0, null, defaultCamera(), W, H);
    const ghost = scene.prims.filter((p) => p.kind === "line" && p.stroke === TARGET_GHOST_CSS);
    expect(ghost.length).toBe(model.edges.length);
    // ghost draws underneath everything else
    expect(scene.prims.indexOf(ghost[0]!)).toBe(0);
  });

  it("highlights the grabbed vertex", () => {
    const { circles: cs } = circles({ "0": [0], "1": [] }, 0, 0);
    expect(cs.get(0)!.r).toBeGreaterThan(cs.get(1)!.r);
    expect(cs.get(0)!.outline).toBeTruthy();
  });

  it("positions are taken verbatim from the snapshot (no prediction)", () => {
    const model = cubeModel();
    const snapA = snapshot({ "0": [], "1": [] });
    const snapB = snapshot({ "0": [], "1": [] });
    snapB.positions["0"] = [0.25, 0.25, 0.25];
    const a = buildScene(snapA, model, model.edges, 0, null, defaultCamera(), W, H);
    const b = buildScene(snapB, model, model.edges, 0, null, defaultCamera(), W, H);
    const ca = [...a.prims].find((p): p is CirclePrim => p.kind === "circle" && p.id === 0)!;
    const cb = [...b.prims].find((p): p is CirclePrim => p.kind === "circle" && p.id === 0)!;
    expect(ca.x).not.toBeCloseTo(cb.x, 1);
  });
});
