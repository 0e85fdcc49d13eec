"""Vector, quaternion, and grabbed-vertex transform math.

Conventions used throughout the engine:

- Lengths are meters, angles radians.
- ``Vec3`` and ``Quat`` are immutable tuples. Components are expected to be
  finite; finiteness is enforced at system boundaries (file and wire
  parsing), not per arithmetic op.
- ``Quat`` is stored ``(x, y, z, w)`` and kept unit length. ``rotate``
  applies the rotation to a vector (``q v q*``).
- Euler angles are Tait-Bryan, intrinsic yaw(z) -> pitch(y) -> roll(x),
  packed into a ``Vec3`` as (roll, pitch, yaw).
- Group transforms are anchored at a pivot: the arithmetic centroid of the
  group at grab start. A grabbed vertex's handle motion relative to that
  pivot parameterizes the whole group's transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

# Rotate/scale grabs need a usable lever arm; closer than this to the pivot
# the direction/ratio is numerically meaningless.
EPS_PIVOT = 1e-4

# Per-tick scale ratios are clamped so a near-pivot handle cannot blow up
# the group.
SCALE_MIN = 0.01
SCALE_MAX = 100.0

# |pitch| within this margin of +-pi/2 counts as gimbal proximity.
GIMBAL_MARGIN = 1e-3

_UNIT_TOL = 1e-6


class DegeneratePivotError(ValueError):
    """Rotate/scale input point is too close to the pivot."""


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":  # type: ignore[override]
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def distance(self, other: "Vec3") -> float:
        return (self - other).norm()

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


ZERO = Vec3(0.0, 0.0, 0.0)
X_AXIS = Vec3(1.0, 0.0, 0.0)
Y_AXIS = Vec3(0.0, 1.0, 0.0)
Z_AXIS = Vec3(0.0, 0.0, 1.0)


class Quat(NamedTuple):
    x: float
    y: float
    z: float
    w: float

    @classmethod
    def from_axis_angle(cls, axis: Vec3, angle: float) -> "Quat":
        a = axis.normalized()
        half = 0.5 * angle
        s = math.sin(half)
        return cls(a.x * s, a.y * s, a.z * s, math.cos(half))

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w)

    def normalized(self) -> "Quat":
        n = self.norm()
        if n <= 0.0:
            raise ValueError("cannot normalize a zero quaternion")
        return Quat(self.x / n, self.y / n, self.z / n, self.w / n)

    def conjugate(self) -> "Quat":
        return Quat(-self.x, -self.y, -self.z, self.w)

    def multiply(self, other: "Quat") -> "Quat":
        """Hamilton product; ``a.multiply(b)`` rotates by ``b`` first, then ``a``."""
        x1, y1, z1, w1 = self
        x2, y2, z2, w2 = other
        return Quat(
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        )

    def rotate(self, v: Vec3) -> Vec3:
        # v' = v + 2w(qv x v) + 2(qv x (qv x v))
        qv = Vec3(self.x, self.y, self.z)
        t = qv.cross(v).scaled(2.0)
        return v + t.scaled(self.w) + qv.cross(t)

    def basis(self) -> tuple[Vec3, Vec3, Vec3]:
        """Rows of the equivalent rotation matrix, for bulk application."""
        x, y, z, w = self
        xx, yy, zz = x * x, y * y, z * z
        xy, xz, yz = x * y, x * z, y * z
        wx, wy, wz = w * x, w * y, w * z
        return (
            Vec3(1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)),
            Vec3(2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)),
            Vec3(2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)),
        )


IDENTITY = Quat(0.0, 0.0, 0.0, 1.0)


def centroid(positions: Iterable[Vec3]) -> Vec3:
    """Component-wise arithmetic mean of the given positions.

    Callers that need bit-reproducible results must pass positions in a
    fixed order (float addition is not associative).
    """
    sx = sy = sz = 0.0
    n = 0
    for p in positions:
        sx += p.x
        sy += p.y
        sz += p.z
        n += 1
    if n == 0:
        raise ValueError("centroid of an empty set")
    return Vec3(sx / n, sy / n, sz / n)


def _require_unit(v: Vec3, name: str) -> None:
    if abs(v.norm() - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be unit length, got |{name}| = {v.norm()!r}")


def minimal_arc_rotation(d0: Vec3, d1: Vec3) -> Quat:
    """Smallest-angle rotation mapping unit vector ``d0`` onto ``d1``.

    The antipodal case (d1 = -d0) has no unique minimal arc; we pick the
    axis normalize(cross(d0, x-axis)), falling back to the y-axis as
    reference when d0 is within 0.99 of +-x. Deterministic by construction.
    """
    _require_unit(d0, "d0")
    _require_unit(d1, "d1")
    d = d0.dot(d1)
    if 1.0 + d < 1e-12:
        ref = X_AXIS if abs(d0.dot(X_AXIS)) <= 0.99 else Y_AXIS
        axis = d0.cross(ref).normalized()
        return Quat(axis.x, axis.y, axis.z, 0.0)
    c = d0.cross(d1)
    return Quat(c.x, c.y, c.z, 1.0 + d).normalized()


def translation_delta(handle_prev: Vec3, handle_now: Vec3) -> Vec3:
    """Handle displacement between two samples; applied to the whole group."""
    return handle_now - handle_prev


def rotation_delta(grabbed_prev: Vec3, grabbed_now: Vec3, pivot: Vec3) -> Quat:
    """Rotation induced by the grabbed point's directional change about the pivot."""
    r0 = grabbed_prev - pivot
    r1 = grabbed_now - pivot
    if r0.norm() <= EPS_PIVOT or r1.norm() <= EPS_PIVOT:
        raise DegeneratePivotError("grabbed point too close to the pivot for rotation")
    return minimal_arc_rotation(r0.normalized(), r1.normalized())


def scale_delta(grabbed_prev: Vec3, grabbed_now: Vec3, pivot: Vec3) -> float:
    """Ratio of pivot distances between two samples, clamped to [0.01, 100]."""
    r0 = (grabbed_prev - pivot).norm()
    if r0 <= EPS_PIVOT:
        raise DegeneratePivotError("grabbed point too close to the pivot for scaling")
    s = (grabbed_now - pivot).norm() / r0
    return min(max(s, SCALE_MIN), SCALE_MAX)


@dataclass(frozen=True, slots=True)
class TransformDelta:
    """One tick's decomposed input: translation, rotation (+ its Tait-Bryan
    reading), and uniform scale."""

    translation: Vec3
    rotation: Quat
    euler: Vec3
    scale: float

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    @classmethod
    def identity(cls) -> "TransformDelta":
        return cls(ZERO, IDENTITY, ZERO, 1.0)

    @classmethod
    def pure_translation(cls, t: Vec3) -> "TransformDelta":
        return cls(t, IDENTITY, ZERO, 1.0)

    @classmethod
    def pure_rotation(cls, q: Quat) -> "TransformDelta":
        return cls(ZERO, q, euler_decompose(q), 1.0)

    @classmethod
    def pure_scale(cls, s: float) -> "TransformDelta":
        return cls(ZERO, IDENTITY, ZERO, s)

    def is_identity(self) -> bool:
        return self.translation == ZERO and self.rotation == IDENTITY and self.scale == 1.0


def apply_delta(
    positions: Mapping[int, Vec3], pivot: Vec3, delta: TransformDelta
) -> dict[int, Vec3]:
    """Map each position p to pivot + scale * (rotation @ (p - pivot)) + translation.

    Pure translations skip the pivot round trip so relative offsets stay
    bit-identical.
    """
    if delta.rotation == IDENTITY and delta.scale == 1.0:
        t = delta.translation
        if t == ZERO:
            return dict(positions)
        return {i: Vec3(p.x + t.x, p.y + t.y, p.z + t.z) for i, p in positions.items()}
    rx, ry, rz = delta.rotation.basis()
    s = delta.scale
    t = delta.translation
    px, py, pz = pivot
    out: dict[int, Vec3] = {}
    for i, p in positions.items():
        dx = p.x - px
        dy = p.y - py
        dz = p.z - pz
        out[i] = Vec3(
            px + s * (rx.x * dx + rx.y * dy + rx.z * dz) + t.x,
            py + s * (ry.x * dx + ry.y * dy + ry.z * dz) + t.y,
            pz + s * (rz.x * dx + rz.y * dy + rz.z * dz) + t.z,
        )
    return out


def euler_decompose(q: Quat) -> Vec3:
    """Tait-Bryan (roll, pitch, yaw) reading of a unit quaternion.

    Within float precision of gimbal lock (|sin pitch| = 1) the yaw/roll
    split is ambiguous; we fix roll = 0 and put the remaining turn in yaw.
    Use :func:`near_gimbal` to detect proximity.
    """
    x, y, z, w = q
    sin_pitch = 2.0 * (y * w - x * z)
    sin_pitch = min(max(sin_pitch, -1.0), 1.0)
    pitch = math.asin(sin_pitch)
    if abs(sin_pitch) > 1.0 - 1e-12:
        roll = 0.0
        yaw = math.atan2(2.0 * (z * w - x * y), 1.0 - 2.0 * (x * x + z * z))
    else:
        yaw = math.atan2(2.0 * (x * y + z * w), 1.0 - 2.0 * (y * y + z * z))
        roll = math.atan2(2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y))
    return Vec3(roll, pitch, yaw)


def euler_compose(e: Vec3) -> Quat:
    """Quaternion for intrinsic yaw(z) -> pitch(y) -> roll(x) angles."""
    qz = Quat.from_axis_angle(Z_AXIS, e.z)
    qy = Quat.from_axis_angle(Y_AXIS, e.y)
    qx = Quat.from_axis_angle(X_AXIS, e.x)
    return qz.multiply(qy).multiply(qx).normalized()


def near_gimbal(q: Quat) -> bool:
    """True when |pitch| is within GIMBAL_MARGIN of +-pi/2."""
    pitch = euler_decompose(q).y
    return abs(abs(pitch) - 0.5 * math.pi) < GIMBAL_MARGIN


def snap_back(
    start_positions: Mapping[int, Vec3], grabbed: int, pivot: Vec3, scale: float
) -> dict[int, Vec3]:
    """Exact scaled positions of a group after a scale grab ends.

    Repositions every vertex (the grabbed one in particular) to
    pivot + scale * (start - pivot), killing the drift accumulated by
    per-tick ratio multiplication and keeping coplanar sets coplanar.
    """
    if grabbed not in start_positions:
        raise ValueError(f"grabbed vertex {grabbed} not in group")
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    if scale == 1.0:
        return dict(start_positions)
    return {i: pivot + (p - pivot).scaled(scale) for i, p in start_positions.items()}
