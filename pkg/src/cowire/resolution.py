"""Conflict resolution for overlapping vertex selections.

Two users' selections are partitioned into joint and disjoint sets. Each
tick, a user's input becomes a per-vertex displacement field (their
transform applied about their own pivot). Disjoint vertices always take
their owner's displacement; joint vertices are governed by the session
strategy:

- preventive ``olr`` (exclusive vertex locking) and ``alr`` (no concurrent
  identical operation on intersecting groups) make same-kind joint
  conflicts unreachable;
- reactive ``additive``/``averaging``/``intersection``/``second-user``
  combine the two displacement fields computationally.

Concurrent inputs of *different* operation kinds always sum: both
operations apply to the joint vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .geometry import ZERO, TransformDelta, Vec3, apply_delta

# Per-axis displacement components smaller than this count as "no input on
# this axis" for the intersection rule.
EPS_AXIS = 1e-7


class OperationKind(Enum):
    TRANSLATE = "translate"
    ROTATE = "rotate"
    SCALE = "scale"


class Strategy(Enum):
    OBJECT_LOCK = "olr"
    ACTION_LOCK = "alr"
    ADDITIVE = "additive"
    AVERAGING = "averaging"
    INTERSECTION = "intersection"
    SECOND_USER = "second-user"

    @property
    def preventive(self) -> bool:
        return self in (Strategy.OBJECT_LOCK, Strategy.ACTION_LOCK)

    @property
    def reactive(self) -> bool:
        return not self.preventive


class ResolutionInvariantError(AssertionError):
    """A state reached resolve_tick that the active strategy must prevent."""


@dataclass(frozen=True)
class OverlapPartition:
    joint: frozenset[int]
    disjoint_a: frozenset[int]
    disjoint_b: frozenset[int]


def partition(selection_a: set[int] | frozenset[int], selection_b: set[int] | frozenset[int]) -> OverlapPartition:
    a = frozenset(selection_a)
    b = frozenset(selection_b)
    return OverlapPartition(joint=a & b, disjoint_a=a - b, disjoint_b=b - a)


def check_olr_select(user: int, vertex: int, lock_table: Mapping[int, int]) -> str | None:
    """Exclusive locking: deny selecting a vertex another user holds.

    Returns a deny reason, or None to allow. Reselecting one's own locked
    vertex is allowed (idempotent).
    """
    owner = lock_table.get(vertex)
    if owner is not None and owner != user:
        return "olr_locked"
    return None


def check_alr_grab(
    user: int,
    op: OperationKind,
    part: OverlapPartition,
    active_ops: Mapping[int, OperationKind],
) -> str | None:
    """Operation precedence: deny a grab that would run the same operation
    kind concurrently on intersecting groups.

    ``active_ops`` maps user id to the kind of their currently held grab.
    The earlier grab holds precedence by construction: it is the one
    already active.
    """
    if not part.joint:
        return None
    for other, kind in active_ops.items():
        if other != user and kind == op:
            return "alr_same_op"
    return None


def induced_displacements(
    group_positions: Mapping[int, Vec3], pivot: Vec3, delta: TransformDelta
) -> dict[int, Vec3]:
    """Per-vertex displacement one user's tick delta induces on their group."""
    moved = apply_delta(group_positions, pivot, delta)
    return {i: moved[i] - p for i, p in group_positions.items()}


def resolve_additive(d1: Vec3, d2: Vec3) -> Vec3:
    return d1 + d2


def resolve_average(d1: Vec3, d2: Vec3) -> Vec3:
    return (d1 + d2).scaled(0.5)


def _intersect_axis(a: float, b: float) -> float:
    a_live = abs(a) >= EPS_AXIS
    b_live = abs(b) >= EPS_AXIS
    if not a_live and not b_live:
        return 0.0
    if not a_live:
        return b
    if not b_live:
        return a
    if (a > 0.0) != (b > 0.0):
        return 0.0
    return a if abs(a) <= abs(b) else b


def resolve_intersection(d1: Vec3, d2: Vec3) -> Vec3:
    """Keep only motion both users agree on, per axis.

    Same sign: the smaller magnitude. Opposite signs: zero. A near-zero
    component is treated as "no input on this axis" and the other side
    passes through.
    """
    return Vec3(
        _intersect_axis(d1.x, d2.x),
        _intersect_axis(d1.y, d2.y),
        _intersect_axis(d1.z, d2.z),
    )


def resolve_second_user(d1: Vec3, seq1: int, d2: Vec3, seq2: int) -> Vec3:
    """Last writer wins: the displacement of the later-started grab."""
    if seq1 == seq2:
        raise ValueError("grab sequence numbers must be unique")
    return d2 if seq2 > seq1 else d1


@dataclass(frozen=True)
class ActiveInput:
    """One user's contribution to a tick: the kind and start order of their
    held grab plus the displacement field it induced (empty when the grab
    is held but produced no motion this tick)."""

    kind: OperationKind
    seq: int
    field: Mapping[int, Vec3]


def _combine_joint(a: ActiveInput, b: ActiveInput, vertex: int, strategy: Strategy) -> Vec3:
    da = a.field.get(vertex, ZERO)
    db = b.field.get(vertex, ZERO)
    if a.kind != b.kind:
        return da + db
    if strategy is Strategy.ADDITIVE:
        return resolve_additive(da, db)
    if strategy is Strategy.AVERAGING:
        return resolve_average(da, db)
    if strategy is Strategy.INTERSECTION:
        return resolve_intersection(da, db)
    if strategy is Strategy.SECOND_USER:
        return resolve_second_user(da, a.seq, db, b.seq)
    raise ResolutionInvariantError(
        f"concurrent {a.kind.value} grabs on joint vertices under {strategy.value}"
    )


def resolve_tick(
    positions: Mapping[int, Vec3],
    inputs: Mapping[int, ActiveInput],
    part: OverlapPartition,
    strategy: Strategy,
) -> dict[int, Vec3]:
    """Apply both users' tick inputs to the whole model's positions.

    ``inputs`` maps user id (0/1) to their ActiveInput; absent means no held
    grab. Vertices in neither selection never move.
    """
    if strategy is Strategy.OBJECT_LOCK and part.joint:
        raise ResolutionInvariantError("overlapping selections under object locking")
    a = inputs.get(0)
    b = inputs.get(1)
    out = dict(positions)
    if a is not None:
        for i in part.disjoint_a:
            d = a.field.get(i)
            if d is not None:
                out[i] = positions[i] + d
    if b is not None:
        for i in part.disjoint_b:
            d = b.field.get(i)
            if d is not None:
                out[i] = positions[i] + d
    for i in part.joint:
        if a is not None and b is not None:
            d = _combine_joint(a, b, i, strategy)
        elif a is not None:
            d = a.field.get(i, ZERO)
        elif b is not None:
            d = b.field.get(i, ZERO)
        else:
            continue
        out[i] = positions[i] + d
    return out
