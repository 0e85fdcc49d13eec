"""Server-authoritative two-user editing session.

All mutations flow through :meth:`Session.handle_message` and
:meth:`Session.advance_tick`, which the owner must call from a single
totally-ordered event loop. Every inbound and outbound message is logged
with a server-assigned sequence number; transitions are deterministic, so
an identical message sequence with identical tick boundaries reproduces the
session bit for bit.

Inbound message types: join, select, deselect, confirm_group, cancel_group,
set_op, grab, move, release, match_check, and the synthetic leave (a
disconnect, also usable in scripted scenarios). Outbound: welcome, state,
deny, match_result, peer_left, error. A deny carries a machine-readable
reason (olr_locked, alr_same_op, degenerate_pivot, no_group, bad_vertex)
plus the sequence number of the rejected message; an error is followed by
the connection being dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geometry import (
    EPS_PIVOT,
    TransformDelta,
    Vec3,
    centroid,
    rotation_delta,
    scale_delta,
    snap_back,
    translation_delta,
)
from .model import ModelError, WireframeModel
from .resolution import (
    ActiveInput,
    OperationKind,
    Strategy,
    check_alr_grab,
    check_olr_select,
    induced_displacements,
    partition,
    resolve_tick,
)

DEFAULT_TICK_HZ = 90.0
MATCH_THRESHOLD_M = 0.05

Outbound = list[tuple[int, dict]]


class ProtocolError(ValueError):
    """Malformed inbound message; the sender's connection must be dropped."""


class ColorState(Enum):
    AVAILABLE = "available"
    MINE = "mine"
    PARTNER = "partner"
    SHARED = "shared"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_ms: float
    user: int
    dir: str  # "in" | "out"
    msg: dict

    def to_obj(self) -> dict:
        return {"seq": self.seq, "t_ms": self.t_ms, "user": self.user, "dir": self.dir, "msg": self.msg}


@dataclass
class GrabState:
    owner: int
    vertex: int
    kind: OperationKind
    pivot: Vec3
    handle_prev: Vec3
    start_seq: int
    start_positions: dict[int, Vec3]
    pending_handle: Vec3 | None = None
    scale_applied: float = 1.0
    partner_overlap: bool = False


@dataclass
class UserState:
    name: str = ""
    joined: bool = False
    left: bool = False
    pending: set[int] = field(default_factory=set)
    group: frozenset[int] | None = None
    op: OperationKind = OperationKind.TRANSLATE
    grab: GrabState | None = None

    @property
    def active(self) -> bool:
        return self.joined and not self.left

    def selection(self) -> set[int]:
        sel = set(self.pending)
        if self.group is not None:
            sel |= self.group
        return sel


def match_check(
    model: WireframeModel, target: WireframeModel, threshold: float = MATCH_THRESHOLD_M
) -> tuple[bool, dict[int, float]]:
    """Per-vertex Euclidean distances to the target; matched when every
    distance is within the threshold (boundary inclusive).

    Uses hypot so an axis-aligned offset of exactly the threshold sits
    exactly on the boundary.
    """
    if set(model.vertices) != set(target.vertices):
        raise ModelError("model and target must share the same vertex ids")
    distances = {}
    for i in sorted(model.vertices):
        d = model.vertices[i] - target.vertices[i]
        distances[i] = math.hypot(d.x, d.y, d.z)
    return all(d <= threshold for d in distances.values()), distances


def _parse_vec3(value) -> Vec3:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise ProtocolError("expected a 3-element number array")
    v = Vec3(float(value[0]), float(value[1]), float(value[2]))
    if not v.is_finite():
        raise ProtocolError("coordinates must be finite")
    return v


def _parse_vertex(msg: dict) -> int:
    v = msg.get("vertex")
    if not isinstance(v, int) or isinstance(v, bool):
        raise ProtocolError("'vertex' must be an integer")
    return v


_OPS = {k.value: k for k in OperationKind}


class Session:
    """Authoritative state for one two-user editing session."""

    def __init__(
        self,
        model: WireframeModel,
        target: WireframeModel,
        strategy: Strategy,
        tick_hz: float = DEFAULT_TICK_HZ,
    ):
        model.validate()
        target.validate()
        if set(model.vertices) != set(target.vertices):
            raise ModelError("model and target must share the same vertex ids")
        self.model = model.copy()
        self.target = target.copy()
        self.strategy = strategy
        self.tick_hz = tick_hz
        self.users = [UserState(), UserState()]
        self.lock_table: dict[int, int] = {}
        self.tick = 0
        self.next_seq = 0
        self.events: list[SessionEvent] = []

    # -- logging -----------------------------------------------------------

    def _log(self, user: int, direction: str, msg: dict, t_ms: float) -> int:
        seq = self.next_seq
        self.next_seq += 1
        self.events.append(SessionEvent(seq, t_ms, user, direction, msg))
        return seq

    def _emit(self, outbound: Outbound, t_ms: float) -> Outbound:
        for recipient, msg in outbound:
            self._log(recipient, "out", msg, t_ms)
        return outbound

    # -- message handling ----------------------------------------------------

    def handle_message(self, user: int, msg: dict, t_ms: float) -> Outbound:
        """Process one inbound message; returns (recipient, message) pairs."""
        if user not in (0, 1):
            raise ValueError(f"invalid user id {user!r}")
        seq = self._log(user, "in", msg, t_ms)
        try:
            out = self._dispatch(user, msg, seq)
        except ProtocolError as exc:
            out = [(user, {"type": "error", "message": str(exc)})]
            out += self._leave(user)
        return self._emit(out, t_ms)

    def _dispatch(self, user: int, msg: dict, seq: int) -> Outbound:
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            raise ProtocolError("message must be an object with a string 'type'")
        mtype = msg["type"]
        if mtype == "join":
            return self._join(user, msg)
        if mtype == "leave":
            return self._leave(user)
        state = self.users[user]
        if not state.active:
            raise ProtocolError("not joined")
        if mtype == "select":
            return self._select(user, _parse_vertex(msg), seq)
        if mtype == "deselect":
            return self._deselect(user, _parse_vertex(msg), seq)
        if mtype == "confirm_group":
            return self._confirm_group(user, seq)
        if mtype == "cancel_group":
            return self._cancel_group(user)
        if mtype == "set_op":
            op = msg.get("op")
            if op not in _OPS:
                raise ProtocolError(f"unknown operation {op!r}")
            state.op = _OPS[op]
            return []
        if mtype == "grab":
            return self._grab(user, _parse_vertex(msg), _parse_vec3(msg.get("handle")), seq)
        if mtype == "move":
            if state.grab is not None:
                state.grab.pending_handle = _parse_vec3(msg.get("handle"))
            return []
        if mtype == "release":
            self._release_grab(user)
            return []
        if mtype == "match_check":
            return self._match_check()
        raise ProtocolError(f"unknown message type {mtype!r}")

    def _deny(self, user: int, reason: str, seq: int) -> Outbound:
        return [(user, {"type": "deny", "reason": reason, "seq": seq})]

    def _join(self, user: int, msg: dict) -> Outbound:
        state = self.users[user]
        if state.joined:
            return [(user, {"type": "error", "message": "already joined"})]
        name = msg.get("name")
        state.joined = True
        state.name = name if isinstance(name, str) else f"user{user}"
        welcome = {
            "type": "welcome",
            "user_id": user,
            "model": self.model.to_obj(),
            "target": self.target.to_obj(),
            "strategy": self.strategy.value,
        }
        return [(user, welcome)]

    def _leave(self, user: int) -> Outbound:
        state = self.users[user]
        if not state.active:
            return []
        self._release_grab(user)
        state.group = None
        state.pending.clear()
        state.left = True
        self._refresh_locks(user)
        other = self.users[1 - user]
        if other.active:
            return [(1 - user, {"type": "peer_left"})]
        return []

    def _select(self, user: int, vertex: int, seq: int) -> Outbound:
        if vertex not in self.model.vertices:
            return self._deny(user, "bad_vertex", seq)
        if self.strategy is Strategy.OBJECT_LOCK:
            reason = check_olr_select(user, vertex, self.lock_table)
            if reason is not None:
                return self._deny(user, reason, seq)
        self.users[user].pending.add(vertex)
        self._refresh_locks(user)
        return []

    def _deselect(self, user: int, vertex: int, seq: int) -> Outbound:
        if vertex not in self.model.vertices:
            return self._deny(user, "bad_vertex", seq)
        self.users[user].pending.discard(vertex)
        self._refresh_locks(user)
        return []

    def _confirm_group(self, user: int, seq: int) -> Outbound:
        state = self.users[user]
        if not state.pending:
            return self._deny(user, "no_group", seq)
        self._release_grab(user)
        state.group = frozenset(state.pending)
        state.pending.clear()
        self._refresh_locks(user)
        return []

    def _cancel_group(self, user: int) -> Outbound:
        state = self.users[user]
        self._release_grab(user)
        state.group = None
        state.pending.clear()
        self._refresh_locks(user)
        return []

    def _grab(self, user: int, vertex: int, handle: Vec3, seq: int) -> Outbound:
        state = self.users[user]
        if state.group is None:
            return self._deny(user, "no_group", seq)
        if vertex not in self.model.vertices or vertex not in state.group:
            return self._deny(user, "bad_vertex", seq)
        # Re-grabbing implies letting go of the previous grab, even if the
        # new grab then gets denied.
        self._release_grab(user)
        kind = state.op
        other = self.users[1 - user]
        if self.strategy is Strategy.ACTION_LOCK:
            part = partition(state.group, other.group or frozenset())
            active_ops = {1 - user: other.grab.kind} if other.grab is not None else {}
            reason = check_alr_grab(user, kind, part, active_ops)
            if reason is not None:
                return self._deny(user, reason, seq)
        pivot = centroid([self.model.vertices[i] for i in sorted(state.group)])
        if kind is not OperationKind.TRANSLATE:
            if (
                (self.model.vertices[vertex] - pivot).norm() <= EPS_PIVOT
                or (handle - pivot).norm() <= EPS_PIVOT
            ):
                return self._deny(user, "degenerate_pivot", seq)
        state.grab = GrabState(
            owner=user,
            vertex=vertex,
            kind=kind,
            pivot=pivot,
            handle_prev=handle,
            start_seq=seq,
            start_positions={i: self.model.vertices[i] for i in sorted(state.group)},
        )
        return []

    def _release_grab(self, user: int) -> None:
        grab = self.users[user].grab
        if grab is None:
            return
        # Scale grabs snap the group onto the exact end-to-end scaled
        # positions, unless a partner grab overlapped mid-grab (the combined
        # result must stand).
        if grab.kind is OperationKind.SCALE and not grab.partner_overlap:
            self.model.vertices.update(
                snap_back(grab.start_positions, grab.vertex, grab.pivot, grab.scale_applied)
            )
        self.users[user].grab = None

    def _match_check(self) -> Outbound:
        matched, distances = match_check(self.model, self.target)
        msg = {
            "type": "match_result",
            "matched": matched,
            "max_error_m": max(distances.values()),
        }
        return [(uid, msg) for uid in (0, 1) if self.users[uid].active]

    def _refresh_locks(self, user: int) -> None:
        if self.strategy is not Strategy.OBJECT_LOCK:
            return
        for vertex in [v for v, owner in self.lock_table.items() if owner == user]:
            del self.lock_table[vertex]
        for vertex in self.users[user].selection():
            self.lock_table[vertex] = user

    # -- tick loop -----------------------------------------------------------

    def _tick_delta(self, grab: GrabState) -> TransformDelta | None:
        if grab.pending_handle is None:
            return None
        handle = grab.pending_handle
        grab.pending_handle = None
        if grab.kind is OperationKind.TRANSLATE:
            delta = TransformDelta.pure_translation(translation_delta(grab.handle_prev, handle))
            grab.handle_prev = handle
            return delta
        if (handle - grab.pivot).norm() <= EPS_PIVOT:
            # Unusable sample: keep the previous anchor so the grab recovers
            # when the handle moves clear of the pivot.
            return None
        if grab.kind is OperationKind.ROTATE:
            q = rotation_delta(grab.handle_prev, handle, grab.pivot)
            grab.handle_prev = handle
            return TransformDelta.pure_rotation(q)
        s = scale_delta(grab.handle_prev, handle, grab.pivot)
        grab.scale_applied *= s
        grab.handle_prev = handle
        return TransformDelta.pure_scale(s)

    def advance_tick(self, t_ms: float) -> Outbound:
        """Resolve this tick's grab inputs and broadcast the new snapshot."""
        self.tick += 1
        grab_a = self.users[0].grab
        grab_b = self.users[1].grab
        if grab_a is not None and grab_b is not None:
            if self.users[0].group & self.users[1].group:  # type: ignore[operator]
                grab_a.partner_overlap = True
                grab_b.partner_overlap = True
        inputs: dict[int, ActiveInput] = {}
        for uid in (0, 1):
            grab = self.users[uid].grab
            if grab is None:
                continue
            delta = self._tick_delta(grab)
            if delta is None:
                displacements: dict[int, Vec3] = {}
            else:
                group = self.users[uid].group or frozenset()
                positions = {i: self.model.vertices[i] for i in sorted(group)}
                displacements = induced_displacements(positions, grab.pivot, delta)
            inputs[uid] = ActiveInput(grab.kind, grab.start_seq, displacements)
        if inputs:
            part = partition(
                self.users[0].group or frozenset(), self.users[1].group or frozenset()
            )
            self.model.vertices = resolve_tick(self.model.vertices, inputs, part, self.strategy)
        snapshot = self.snapshot()
        out = [(uid, snapshot) for uid in (0, 1) if self.users[uid].active]
        return self._emit(out, t_ms)

    # -- views ---------------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "type": "state",
            "tick": self.tick,
            "positions": {
                str(i): [p.x, p.y, p.z] for i, p in sorted(self.model.vertices.items())
            },
            "selections": {
                "0": sorted(self.users[0].selection()),
                "1": sorted(self.users[1].selection()),
            },
            "active_ops": {
                "0": self.users[0].grab.kind.value if self.users[0].grab else None,
                "1": self.users[1].grab.kind.value if self.users[1].grab else None,
            },
        }

    def color_state(self, viewer: int) -> dict[int, ColorState]:
        """Egocentric ownership colors for every vertex."""
        if viewer not in (0, 1):
            raise ValueError(f"invalid viewer {viewer!r}")
        mine = self.users[viewer].selection()
        theirs = self.users[1 - viewer].selection()
        colors = {}
        for i in self.model.vertices:
            if i in mine and i in theirs:
                colors[i] = ColorState.SHARED
            elif i in mine:
                colors[i] = ColorState.MINE
            elif i in theirs:
                colors[i] = ColorState.PARTNER
            else:
                colors[i] = ColorState.AVAILABLE
        return colors

    def state_hash(self) -> str:
        return self.model.state_hash()


def tick_period_ms(tick_hz: float) -> float:
    if not (math.isfinite(tick_hz) and tick_hz > 0):
        raise ValueError(f"tick rate must be positive, got {tick_hz!r}")
    return 1000.0 / tick_hz
