"""Brute-force reference resolver for small scenarios.

Recomputes a scenario's final vertex positions with flat per-vertex
arithmetic: every rule (selection, locking, per-tick deltas, displacement
combination, snap-back) is restated here directly rather than calling the
engine, sharing only the Vec3/Quat primitives. The simulation harness
cross-checks the engine against this on randomized small scenarios, so keep
this file naive and literal; do not refactor it to reuse engine code.

Tractable for <= 8 vertices and two users; no event log, no outbound
messages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import Quat, Vec3
from .harness import Action, Scenario
from .model import WireframeModel

_EPS_PIVOT = 1e-4
_SCALE_MIN = 0.01
_SCALE_MAX = 100.0
_EPS_AXIS = 1e-7


@dataclass
class _Grab:
    vertex: int
    kind: str
    pivot: Vec3
    handle_prev: Vec3
    seq: int
    start_positions: dict[int, Vec3]
    pending: Vec3 | None = None
    scale_acc: float = 1.0
    tainted: bool = False


@dataclass
class _User:
    joined: bool = False
    left: bool = False
    pending: set[int] = field(default_factory=set)
    group: frozenset[int] | None = None
    op: str = "translate"
    grab: _Grab | None = None

    @property
    def active(self) -> bool:
        return self.joined and not self.left

    def selection(self) -> set[int]:
        return self.pending | (self.group or frozenset())


def _vec(value) -> Vec3:
    return Vec3(float(value[0]), float(value[1]), float(value[2]))


def _from_to(d0: Vec3, d1: Vec3) -> Quat:
    c = d0.dot(d1)
    if 1.0 + c < 1e-12:
        ref = Vec3(1.0, 0.0, 0.0) if abs(d0.x) <= 0.99 else Vec3(0.0, 1.0, 0.0)
        a = d0.cross(ref).normalized()
        return Quat(a.x, a.y, a.z, 0.0)
    axis = d0.cross(d1)
    s = axis.norm()
    if s == 0.0:
        return Quat(0.0, 0.0, 0.0, 1.0)
    return Quat.from_axis_angle(axis, math.atan2(s, c))


def _mean(positions: dict[int, Vec3], ids) -> Vec3:
    sx = sy = sz = 0.0
    n = 0
    for i in sorted(ids):
        p = positions[i]
        sx += p.x
        sy += p.y
        sz += p.z
        n += 1
    return Vec3(sx / n, sy / n, sz / n)


def _intersect_axis(a: float, b: float) -> float:
    a_live = abs(a) >= _EPS_AXIS
    b_live = abs(b) >= _EPS_AXIS
    if not a_live and not b_live:
        return 0.0
    if not a_live:
        return b
    if not b_live:
        return a
    if (a > 0.0) != (b > 0.0):
        return 0.0
    return a if abs(a) <= abs(b) else b


class _Oracle:
    def __init__(self, scenario: Scenario):
        self.positions = dict(scenario.model.vertices)
        self.strategy = scenario.strategy.value
        self.period = 1000.0 / scenario.tick_hz
        self.users = [_User(), _User()]
        self.counter = 0

    def _release(self, user: _User) -> None:
        g = user.grab
        if g is not None and g.kind == "scale" and not g.tainted:
            s = g.scale_acc
            for i, p0 in g.start_positions.items():
                if s == 1.0:
                    self.positions[i] = p0
                else:
                    self.positions[i] = Vec3(
                        g.pivot.x + (p0.x - g.pivot.x) * s,
                        g.pivot.y + (p0.y - g.pivot.y) * s,
                        g.pivot.z + (p0.z - g.pivot.z) * s,
                    )
        user.grab = None

    def _leave(self, user: _User) -> None:
        if not user.active:
            return
        self._release(user)
        user.group = None
        user.pending.clear()
        user.left = True

    def apply_message(self, uid: int, msg: dict) -> None:
        self.counter += 1
        seq = self.counter
        user = self.users[uid]
        other = self.users[1 - uid]
        mtype = msg.get("type")
        if mtype == "join":
            user.joined = True
            return
        if mtype == "leave":
            self._leave(user)
            return
        if not user.active:
            return
        if mtype == "select":
            v = msg["vertex"]
            if v not in self.positions:
                return
            if self.strategy == "olr" and v in other.selection():
                return
            user.pending.add(v)
        elif mtype == "deselect":
            v = msg["vertex"]
            if v in self.positions:
                user.pending.discard(v)
        elif mtype == "confirm_group":
            if not user.pending:
                return
            self._release(user)
            user.group = frozenset(user.pending)
            user.pending.clear()
        elif mtype == "cancel_group":
            self._release(user)
            user.group = None
            user.pending.clear()
        elif mtype == "set_op":
            user.op = msg["op"]
        elif mtype == "grab":
            v = msg["vertex"]
            if user.group is None:
                return
            if v not in self.positions or v not in user.group:
                return
            self._release(user)
            kind = user.op
            if self.strategy == "alr" and other.group is not None and (user.group & other.group):
                if other.grab is not None and other.grab.kind == kind:
                    return
            pivot = _mean(self.positions, user.group)
            handle = _vec(msg["handle"])
            if kind != "translate":
                if (self.positions[v] - pivot).norm() <= _EPS_PIVOT:
                    return
                if (handle - pivot).norm() <= _EPS_PIVOT:
                    return
            user.grab = _Grab(
                vertex=v,
                kind=kind,
                pivot=pivot,
                handle_prev=handle,
                seq=seq,
                start_positions={i: self.positions[i] for i in sorted(user.group)},
            )
        elif mtype == "move":
            if user.grab is not None:
                user.grab.pending = _vec(msg["handle"])
        elif mtype == "release":
            self._release(user)
        # match_check and anything else: no state change

    def _tick_field(self, user: _User) -> dict[int, Vec3] | None:
        """Displacements this grab contributes this tick; None when the user
        holds no grab at all, {} when held but motionless."""
        g = user.grab
        if g is None:
            return None
        if g.pending is None:
            return {}
        h = g.pending
        g.pending = None
        group = sorted(user.group or ())
        if g.kind == "translate":
            t = h - g.handle_prev
            g.handle_prev = h
            out = {}
            for i in group:
                p = self.positions[i]
                moved = Vec3(p.x + t.x, p.y + t.y, p.z + t.z)
                out[i] = moved - p
            return out
        if (h - g.pivot).norm() <= _EPS_PIVOT:
            return {}
        if g.kind == "rotate":
            q = _from_to((g.handle_prev - g.pivot).normalized(), (h - g.pivot).normalized())
            g.handle_prev = h
            out = {}
            for i in group:
                p = self.positions[i]
                moved = g.pivot + q.rotate(p - g.pivot)
                out[i] = moved - p
            return out
        s = (h - g.pivot).norm() / (g.handle_prev - g.pivot).norm()
        s = min(max(s, _SCALE_MIN), _SCALE_MAX)
        g.scale_acc *= s
        g.handle_prev = h
        out = {}
        for i in group:
            p = self.positions[i]
            moved = Vec3(
                g.pivot.x + s * (p.x - g.pivot.x),
                g.pivot.y + s * (p.y - g.pivot.y),
                g.pivot.z + s * (p.z - g.pivot.z),
            )
            out[i] = moved - p
        return out

    def _combine(self, da: Vec3, db: Vec3, grab_a: _Grab, grab_b: _Grab) -> Vec3:
        if grab_a.kind != grab_b.kind:
            return da + db
        if self.strategy == "additive":
            return da + db
        if self.strategy == "averaging":
            return Vec3((da.x + db.x) / 2.0, (da.y + db.y) / 2.0, (da.z + db.z) / 2.0)
        if self.strategy == "intersection":
            return Vec3(
                _intersect_axis(da.x, db.x),
                _intersect_axis(da.y, db.y),
                _intersect_axis(da.z, db.z),
            )
        if self.strategy == "second-user":
            return db if grab_b.seq > grab_a.seq else da
        raise AssertionError(f"same-kind concurrency unreachable under {self.strategy}")

    def advance_tick(self) -> None:
        ua, ub = self.users
        if ua.grab is not None and ub.grab is not None:
            if (ua.group or frozenset()) & (ub.group or frozenset()):
                ua.grab.tainted = True
                ub.grab.tainted = True
        field_a = self._tick_field(ua)
        field_b = self._tick_field(ub)
        if field_a is None and field_b is None:
            return
        group_a = ua.group if (ua.group is not None and field_a is not None) else frozenset()
        group_b = ub.group if (ub.group is not None and field_b is not None) else frozenset()
        zero = Vec3(0.0, 0.0, 0.0)
        for i in sorted(self.positions):
            in_a = i in group_a
            in_b = i in group_b
            p = self.positions[i]
            if in_a and in_b:
                da = field_a.get(i, zero)
                db = field_b.get(i, zero)
                self.positions[i] = p + self._combine(da, db, ua.grab, ub.grab)
            elif in_a:
                d = field_a.get(i)
                if d is not None:
                    self.positions[i] = p + d
            elif in_b:
                d = field_b.get(i)
                if d is not None:
                    self.positions[i] = p + d

    def run(self, actions) -> None:
        last_t = max(a.t_ms for a in actions)
        n_ticks = int(last_t // self.period) + 1
        idx = 0
        for k in range(1, n_ticks + 1):
            boundary = k * self.period
            while idx < len(actions) and actions[idx].t_ms < boundary:
                self.apply_message(actions[idx].user, actions[idx].msg)
                idx += 1
            self.advance_tick()


def oracle_resolve(scenario: Scenario) -> WireframeModel:
    """Final model per the literal resolution rules, computed naively."""
    if len(scenario.model.vertices) > 8:
        raise ValueError("oracle is restricted to models with at most 8 vertices")
    actions = list(scenario.actions)
    joined = {a.user for a in actions if a.msg.get("type") == "join"}
    for user in (0, 1):
        if user not in joined:
            actions.insert(0, Action(0.0, user, {"type": "join", "name": f"user{user}"}))
    actions.sort(key=lambda a: (a.t_ms, a.user))
    oracle = _Oracle(scenario)
    oracle.run(actions)
    out = scenario.model.copy()
    out.vertices = oracle.positions
    return out
