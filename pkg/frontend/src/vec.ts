/** Minimal 3D vector math and the orbit camera used by the canvas view. */

export interface V3 {
  x: number;
  y: number;
  z: number;
}

export const v3 = (x: number, y: number, z: number): V3 => ({ x, y, z });
export const add = (a: V3, b: V3): V3 => v3(a.x + b.x, a.y + b.y, a.z + b.z);
export const sub = (a: V3, b: V3): V3 => v3(a.x - b.x, a.y - b.y, a.z - b.z);
export const scale = (a: V3, s: number): V3 => v3(a.x * s, a.y * s, a.z * s);
export const dot = (a: V3, b: V3): number => a.x * b.x + a.y * b.y + a.z * b.z;
export const cross = (a: V3, b: V3): V3 =>
  v3(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
export const norm = (a: V3): number => Math.sqrt(dot(a, a));

export function normalize(a: V3): V3 {
  const n = norm(a);
  return n > 0 ? scale(a, 1 / n) : v3(0, 0, 0);
}

/**
 * Orbit camera around a target point, z-up to match the model space.
 * `yaw` spins around the z axis, `pitch` lifts toward it.
 */
export interface Camera {
  target: V3;
  distance: number;
  yaw: number;
  pitch: number;
  focal: number; // projection scale in pixels at unit depth
}

export function defaultCamera(): Camera {
  return { target: v3(0.5, 0.5, 0.5), distance: 3.2, yaw: 0.7, pitch: 0.5, focal: 650 };
}

export interface CameraBasis {
  eye: V3;
  right: V3;
  up: V3;
  forward: V3;
}

export function cameraBasis(cam: Camera): CameraBasis {
  const cp = Math.cos(cam.pitch);
  const offset = v3(
    cp * Math.cos(cam.yaw),
    cp * Math.sin(cam.yaw),
    Math.sin(cam.pitch),
  );
  const eye = add(cam.target, scale(offset, cam.distance));
  const forward = normalize(sub(cam.target, eye));
  const right = normalize(cross(forward, v3(0, 0, 1)));
  const up = cross(right, forward);
  return { eye, right, up, forward };
}

export interface Projected {
  x: number; // canvas px
  y: number;
  depth: number; // distance along the view axis; <= 0 means behind the camera
}

export function project(p: V3, cam: Camera, width: number, height: number): Projected {
  const basis = cameraBasis(cam);
  const rel = sub(p, basis.eye);
  const depth = dot(rel, basis.forward);
  if (depth <= 1e-6) return { x: NaN, y: NaN, depth };
  const sx = (dot(rel, basis.right) / depth) * cam.focal;
  const sy = (dot(rel, basis.up) / depth) * cam.focal;
  return { x: width / 2 + sx, y: height / 2 - sy, depth };
}

/** World-space ray through a canvas pixel. */
export function pointerRay(
  px: number,
  py: number,
  cam: Camera,
  width: number,
  height: number,
): { origin: V3; dir: V3 } {
  const basis = cameraBasis(cam);
  const nx = (px - width / 2) / cam.focal;
  const ny = (height / 2 - py) / cam.focal;
  const dir = normalize(
    add(add(scale(basis.right, nx), scale(basis.up, ny)), basis.forward),
  );
  return { origin: basis.eye, dir };
}

/**
 * Intersect a pointer ray with the camera-facing plane through `anchor`:
 * the drag plane that turns a 2D pointer into a 3D handle position.
 */
export function dragPlanePoint(
  px: number,
  py: number,
  anchor: V3,
  cam: Camera,
  width: number,
  height: number,
): V3 | null {
  const basis = cameraBasis(cam);
  const ray = pointerRay(px, py, cam, width, height);
  const denom = dot(ray.dir, basis.forward);
  if (Math.abs(denom) < 1e-9) return null;
  const t = dot(sub(anchor, ray.origin), basis.forward) / denom;
  if (t <= 0) return null;
  return add(ray.origin, scale(ray.dir, t));
}

/** Nearest projected vertex within `radius` px of the pointer, if any. */
export function pickVertex(
  px: number,
  py: number,
  projected: Map<number, Projected>,
  radius = 10,
): number | null {
  let best: number | null = null;
  let bestDist = radius;
  for (const [id, p] of projected) {
    if (!Number.isFinite(p.x) || p.depth <= 0) continue;
    const d = Math.hypot(p.x - px, p.y - py);
    if (d <= bestDist) {
      bestDist = d;
      best = id;
    }
  }
  return best;
}
