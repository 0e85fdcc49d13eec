"""Generators for task models: the unit-cube start model and non-matching
targets built by transforming whole faces about their centroids."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geometry import TransformDelta, Vec3, X_AXIS, Y_AXIS, Z_AXIS, Quat, apply_delta, centroid
from .model import WireframeModel
from .resolution import OperationKind
from .session import MATCH_THRESHOLD_M, match_check

DEFAULT_TRANSLATE_RANGE = (0.1, 0.4)  # m, per axis
DEFAULT_ROTATE_RANGE = (math.radians(15.0), math.radians(60.0))
DEFAULT_SCALE_RANGE = (0.6, 1.6)

_AXES = (X_AXIS, Y_AXIS, Z_AXIS)


class GenerationError(RuntimeError):
    """No non-matching target found within the attempt budget."""


@dataclass(frozen=True)
class TargetSpec:
    """Constraints for a generated target: how many faces to transform, how
    many operations per face, and the magnitude ranges to sample from."""

    seed: int
    faces_transformed: int = 2
    ops_per_face: int = 2
    op_pool: tuple[OperationKind, ...] = (
        OperationKind.TRANSLATE,
        OperationKind.ROTATE,
        OperationKind.SCALE,
    )
    translate_range: tuple[float, float] = DEFAULT_TRANSLATE_RANGE
    rotate_range: tuple[float, float] = DEFAULT_ROTATE_RANGE
    scale_range: tuple[float, float] = DEFAULT_SCALE_RANGE

    def validate(self, base: WireframeModel) -> None:
        if self.faces_transformed < 2:
            raise ValueError("faces_transformed must be at least 2")
        if self.ops_per_face < 2:
            raise ValueError("ops_per_face must be at least 2")
        if self.faces_transformed > len(base.faces):
            raise ValueError(
                f"faces_transformed={self.faces_transformed} exceeds the base model's "
                f"{len(base.faces)} faces"
            )
        if not self.op_pool:
            raise ValueError("op_pool must not be empty")


def gen_cube() -> WireframeModel:
    """Axis-aligned 1 m cube: corners of {0,1}^3, 12 edges, 6 quad faces.

    Vertex id bits encode the corner: id = x + 2y + 4z.
    """
    vertices = {
        i: Vec3(float(i & 1), float((i >> 1) & 1), float((i >> 2) & 1)) for i in range(8)
    }
    edges = [
        (0, 1), (1, 3), (3, 2), (2, 0),  # z = 0 ring
        (4, 5), (5, 7), (7, 6), (6, 4),  # z = 1 ring
        (0, 4), (1, 5), (2, 6), (3, 7),  # verticals
    ]
    faces = [
        (0, 1, 3, 2),  # z = 0
        (4, 5, 7, 6),  # z = 1
        (0, 1, 5, 4),  # y = 0
        (2, 3, 7, 6),  # y = 1
        (0, 2, 6, 4),  # x = 0
        (1, 3, 7, 5),  # x = 1
    ]
    model = WireframeModel(vertices, edges, faces)
    model.validate()
    return model


def _sample_delta(rng: random.Random, kind: OperationKind, spec: TargetSpec) -> TransformDelta:
    if kind is OperationKind.TRANSLATE:
        lo, hi = spec.translate_range
        t = Vec3(
            rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi),
            rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi),
            rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi),
        )
        return TransformDelta.pure_translation(t)
    if kind is OperationKind.ROTATE:
        lo, hi = spec.rotate_range
        axis = rng.choice(_AXES)
        angle = rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi)
        return TransformDelta.pure_rotation(Quat.from_axis_angle(axis, angle))
    lo, hi = spec.scale_range
    return TransformDelta.pure_scale(rng.uniform(lo, hi))


def gen_target(base: WireframeModel, spec: TargetSpec) -> WireframeModel:
    """Transform ``faces_transformed`` randomly chosen faces of ``base`` by
    ``ops_per_face`` sampled operations each, applied in sampled order about
    the face centroid at application time.

    Deterministic per seed. Regenerates with an incremented seed until the
    result does not already match the base under the task threshold; raises
    :class:`GenerationError` after 100 attempts.
    """
    base.validate()
    spec.validate(base)
    for attempt in range(100):
        rng = random.Random(spec.seed + attempt)
        target = base.copy()
        chosen = rng.sample(range(len(base.faces)), spec.faces_transformed)
        for face_index in chosen:
            face_ids = sorted(set(base.faces[face_index]))
            for _ in range(spec.ops_per_face):
                kind = rng.choice(spec.op_pool)
                delta = _sample_delta(rng, kind, spec)
                positions = {i: target.vertices[i] for i in face_ids}
                pivot = centroid([positions[i] for i in face_ids])
                target.vertices.update(apply_delta(positions, pivot, delta))
        matched, _ = match_check(base, target, MATCH_THRESHOLD_M)
        if not matched:
            target.validate()
            return target
    raise GenerationError(
        f"could not generate a non-matching target in 100 attempts (seed {spec.seed}); "
        "are the magnitude ranges degenerate?"
    )
