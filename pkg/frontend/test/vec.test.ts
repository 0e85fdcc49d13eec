import { describe, expect, it } from "vitest";

import {
  Camera,
  cameraBasis,
  defaultCamera,
  dot,
  dragPlanePoint,
  norm,
  pickVertex,
  pointerRay,
  project,
  sub,
  v3,
} from "../src/vec.js";

const W = 800;
const H = 600;

describe("projection", () => {
  it("puts the camera target at the canvas center", () => {
    const cam = defaultCamera();
    const p = project(cam.target, cam, W, H);
    expect(p.x).toBeCloseTo(W / 2, 6);
    expect(p.y).toBeCloseTo(H / 2, 6);
    expect(p.depth).toBeCloseTo(cam.distance, 6);
  });

  it("marks points behind the camera invisible", () => {
    const cam = defaultCamera();
    const basis = cameraBasis(cam);
    const behind = sub(basis.eye, basis.forward);
    expect(project(behind, cam, W, H).depth).toBeLessThanOrEqual(0);
  });

  it("round-trips through pointerRay", () => {
    const cam = defaultCamera();
    const world = v3(0.3, 0.8, 0.1);
    const p = project(world, cam, W, H);
    const ray = pointerRay(p.x, p.y, cam, W, H);
    // the world point must sit on the pointer ray
    const toWorld = sub(world, ray.origin);
    const along = dot(toWorld, ray.dir);
    const offRay = norm(sub(toWorld, v3(ray.dir.x * along, ray.dir.y * along, ray.dir.z * along)));
    expect(offRay).toBeLessThan(1e-9);
  });
});

describe("drag plane", () => {
  it("keeps the anchor fixed when the pointer stays on it", () => {
    const cam = defaultCamera();
    const anchor = v3(1, 0, 1);
    const p = project(anchor, cam, W, H);
    const handle = dragPlanePoint(p.x, p.y, anchor, cam, W, H)!;
    expect(norm(sub(handle, anchor))).toBeLessThan(1e-9);
  });

  it("moves the handle in the camera-facing plane through the anchor", () => {
    const cam = defaultCamera();
    const anchor = v3(0.5, 0.5, 0.5);
    const p = project(anchor, cam, W, H);
    const handle = dragPlanePoint(p.x + 60, p.y - 40, anchor, cam, W, H)!;
    const basis = cameraBasis(cam);
    // same view depth as the anchor: that is what "camera-facing plane" means
    expect(dot(sub(handle, anchor), basis.forward)).toBeCloseTo(0, 9);
    expect(norm(sub(handle, anchor))).toBeGreaterThan(0.01);
  });
});

describe("picking", () => {
  const projected = new Map([
    [0, { x: 100, y: 100, depth: 2 }],
    [1, { x: 200, y: 100, depth: 1 }],
    [2, { x: 104, y: 103, depth: 3 }],
  ]);

  it("picks the nearest vertex within the radius", () => {
    expect(pickVertex(103, 102, projected)).toBe(2);
    expect(pickVertex(99, 99, projected)).toBe(0);
    expect(pickVertex(200, 101, projected)).toBe(1);
  });

  it("returns null away from all vertices", () => {
    expect(pickVertex(400, 400, projected)).toBeNull();
  });

  it("ignores vertices behind the camera", () => {
    const behind = new Map([[5, { x: 100, y: 100, depth: -1 }]]);
    expect(pickVertex(100, 100, behind)).toBeNull();
  });
});
