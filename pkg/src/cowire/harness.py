"""Deterministic scripted driver for two-client sessions.

Scenarios run against a virtual clock: action timestamps map onto fixed
tick boundaries (actions in the same tick window apply in t_ms order, ties
broken by user id), so identical scenarios produce bitwise-identical runs
with no wall-clock dependence. Handle samples take effect at tick
boundaries only; a sample still pending when its grab is released is
discarded.

Scenario file schema:

    {"model": "model.json" | {...inline...},
     "target": "target.json" | {...inline...},
     "strategy": "olr|alr|additive|averaging|intersection|second-user",
     "tick_hz": 90.0,
     "actions": [{"t_ms": 0, "user": 0, "msg": {"type": "select", "vertex": 3}}, ...]}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .model import WireframeModel
from .resolution import Strategy
from .session import DEFAULT_TICK_HZ, Session, SessionEvent, tick_period_ms


class ScenarioError(ValueError):
    """Scenario file violates the schema."""


class CorruptLogError(ValueError):
    """Event log has a sequence gap or is otherwise unusable."""


@dataclass(frozen=True)
class Action:
    t_ms: float
    user: int
    msg: dict


@dataclass
class Scenario:
    model: WireframeModel
    target: WireframeModel
    strategy: Strategy
    actions: list[Action] = field(default_factory=list)
    tick_hz: float = DEFAULT_TICK_HZ


@dataclass
class RunResult:
    final_model: WireframeModel
    events: list[SessionEvent]
    deny_count: int
    tick_count: int

    @property
    def final_hash(self) -> str:
        return self.final_model.state_hash()


def normalized_actions(scenario: Scenario) -> list[Action]:
    """Scenario actions with joins injected at t=0 for users that never join,
    sorted by (t_ms, user id); listing order breaks remaining ties."""
    actions = list(scenario.actions)
    joined = {a.user for a in actions if a.msg.get("type") == "join"}
    for user in (0, 1):
        if user not in joined:
            actions.insert(0, Action(0.0, user, {"type": "join", "name": f"user{user}"}))
    actions.sort(key=lambda a: (a.t_ms, a.user))
    return actions


def run(scenario: Scenario) -> RunResult:
    session = Session(scenario.model, scenario.target, scenario.strategy, scenario.tick_hz)
    actions = normalized_actions(scenario)
    period = tick_period_ms(scenario.tick_hz)
    last_t = max(a.t_ms for a in actions)
    n_ticks = int(last_t // period) + 1
    deny_count = 0
    idx = 0
    for k in range(1, n_ticks + 1):
        boundary = k * period
        while idx < len(actions) and actions[idx].t_ms < boundary:
            a = actions[idx]
            idx += 1
            for _, msg in session.handle_message(a.user, a.msg, a.t_ms):
                if msg.get("type") == "deny":
                    deny_count += 1
        session.advance_tick(boundary)
    return RunResult(session.model.copy(), session.events, deny_count, n_ticks)


# -- event log I/O -----------------------------------------------------------


def write_log(events: list[SessionEvent], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(json.dumps(ev.to_obj(), sort_keys=True) + "\n")


def read_log(path: str | Path) -> list[SessionEvent]:
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                events.append(
                    SessionEvent(
                        seq=obj["seq"],
                        t_ms=float(obj["t_ms"]),
                        user=obj["user"],
                        dir=obj["dir"],
                        msg=obj["msg"],
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptLogError(f"{path}:{line_no}: bad log line: {exc}") from exc
    return events


def verify_contiguous(events: list[SessionEvent]) -> None:
    if not events:
        raise CorruptLogError("log is empty")
    start = events[0].seq
    if start != 0:
        raise CorruptLogError(f"log starts at seq {start}, expected 0")
    for offset, ev in enumerate(events):
        if ev.seq != start + offset:
            raise CorruptLogError(f"sequence gap: expected {start + offset}, found {ev.seq}")


def bootstrap_from_log(events: list[SessionEvent]) -> Session:
    """Reconstruct the initial session from the first welcome in a log."""
    verify_contiguous(events)
    for ev in events:
        if ev.dir == "out" and ev.msg.get("type") == "welcome":
            model = WireframeModel.from_obj(ev.msg["model"])
            target = WireframeModel.from_obj(ev.msg["target"])
            strategy = Strategy(ev.msg["strategy"])
            return Session(model, target, strategy)
    raise CorruptLogError("log contains no welcome message")


def replay(events: list[SessionEvent]) -> WireframeModel:
    """Reapply a log's inbound messages at its recorded tick boundaries.

    The result is bitwise-identical to the live session's final model.
    """
    session = bootstrap_from_log(events)
    applied_ticks: set[int] = set()
    for ev in events:
        if ev.dir == "in":
            session.handle_message(ev.user, ev.msg, ev.t_ms)
        elif ev.msg.get("type") == "state":
            tick = ev.msg["tick"]
            if tick not in applied_ticks:
                applied_ticks.add(tick)
                session.advance_tick(ev.t_ms)
    return session.model


# -- scenario file I/O --------------------------------------------------------


def _load_model_ref(ref, base_dir: Path) -> WireframeModel:
    if isinstance(ref, dict):
        return WireframeModel.from_obj(ref)
    if isinstance(ref, str):
        return WireframeModel.load(base_dir / ref)
    raise ScenarioError(f"model reference must be a path or inline object, got {type(ref).__name__}")


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: {exc}") from exc
    try:
        model = _load_model_ref(obj["model"], path.parent)
        target = _load_model_ref(obj["target"], path.parent)
        strategy = Strategy(obj["strategy"])
        tick_hz = float(obj.get("tick_hz", DEFAULT_TICK_HZ))
        actions = []
        for entry in obj.get("actions", []):
            t_ms = float(entry["t_ms"])
            user = entry["user"]
            msg = entry["msg"]
            if t_ms < 0:
                raise ScenarioError(f"negative t_ms {t_ms}")
            if user not in (0, 1):
                raise ScenarioError(f"user must be 0 or 1, got {user!r}")
            if not isinstance(msg, dict):
                raise ScenarioError("msg must be an object")
            actions.append(Action(t_ms, user, msg))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{path}: malformed scenario: {exc}") from exc
    keys = [(a.t_ms, a.user) for a in actions]
    if keys != sorted(keys):
        raise ScenarioError(f"{path}: actions must be sorted by t_ms then user")
    return Scenario(model, target, strategy, actions, tick_hz)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    obj = {
        "model": scenario.model.to_obj(),
        "target": scenario.target.to_obj(),
        "strategy": scenario.strategy.value,
        "tick_hz": scenario.tick_hz,
        "actions": [{"t_ms": a.t_ms, "user": a.user, "msg": a.msg} for a in scenario.actions],
    }
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


# -- random scenarios and fuzzing ---------------------------------------------


def _random_handle(rng: random.Random) -> list[float]:
    return [rng.uniform(-0.5, 1.5) for _ in range(3)]


def random_scenario(
    seed: int,
    strategy: Strategy,
    min_actions: int = 16,
    max_actions: int = 48,
    max_step_ms: float = 25.0,
    allow_leave: bool = True,
) -> Scenario:
    """Seeded, bounded random scenario on the unit cube (8 vertices).

    The generator tracks an approximate per-user state so most scenarios
    reach actual concurrent manipulation, but it stays blind to denials:
    permission checks, degenerate grabs, and invalid-state messages get
    exercised too.
    """
    from .scenariogen import gen_cube

    rng = random.Random(seed)
    model = gen_cube()
    target = gen_cube()
    actions: list[Action] = []
    t = 0.0
    # believed state per user; denials may make it wrong, which is fine
    pending: list[set[int]] = [set(), set()]
    group: list[set[int]] = [set(), set()]
    grabbing = [False, False]
    left: set[int] = set()
    ops = ["translate", "rotate", "scale"]
    # both users lean toward one operation so same-kind joint concurrency
    # shows up often enough to matter
    theme_op = rng.choice(ops)
    n = rng.randint(min_actions, max_actions)
    for _ in range(n):
        t += rng.uniform(1.0, max_step_ms)
        candidates = [u for u in (0, 1) if u not in left]
        if not candidates:
            break
        user = rng.choice(candidates)
        roll = rng.random()
        if roll < 0.04:
            msg = {"type": rng.choice(["cancel_group", "release", "match_check"])}
            if msg["type"] == "cancel_group":
                pending[user].clear()
                group[user].clear()
                grabbing[user] = False
            elif msg["type"] == "release":
                grabbing[user] = False
        elif roll < 0.05 and actions and allow_leave:
            msg = {"type": "leave"}
            left.add(user)
        elif grabbing[user]:
            if roll < 0.85:
                if grabbing[1 - user] and (1 - user) not in left and rng.random() < 0.6:
                    # both hands moving inside one tick window: the combining
                    # path must carry its weight in the equivalence suite
                    actions.append(Action(t, user, {"type": "move", "handle": _random_handle(rng)}))
                    t += 0.25
                    msg = {"type": "move", "handle": _random_handle(rng)}
                    user = 1 - user
                else:
                    msg = {"type": "move", "handle": _random_handle(rng)}
            else:
                msg = {"type": "release"}
                grabbing[user] = False
        elif group[user]:
            if roll < 0.25:
                op = theme_op if rng.random() < 0.7 else rng.choice(ops)
                msg = {"type": "set_op", "op": op}
            else:
                if rng.random() < 0.85:
                    vertex = rng.choice(sorted(group[user]))
                else:
                    vertex = rng.randrange(8)
                msg = {"type": "grab", "vertex": vertex, "handle": _random_handle(rng)}
                grabbing[user] = True
        elif len(pending[user]) >= 2 and roll < 0.60:
            msg = {"type": "confirm_group"}
            group[user] = set(pending[user])
            pending[user].clear()
        else:
            if roll < 0.90 or not pending[user]:
                vertex = rng.randrange(8)
                msg = {"type": "select", "vertex": vertex}
                pending[user].add(vertex)
            else:
                vertex = rng.choice(sorted(pending[user])) if rng.random() < 0.5 else rng.randrange(8)
                msg = {"type": "deselect", "vertex": vertex}
                pending[user].discard(vertex)
        actions.append(Action(t, user, msg))
    return Scenario(model, target, strategy, actions)


@dataclass
class FuzzResult:
    messages: int
    denials: int
    errors: int
    ticks: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_safety(session: Session, context: str, violations: list[str]) -> None:
    sel_a = session.users[0].selection()
    sel_b = session.users[1].selection()
    if session.strategy is Strategy.OBJECT_LOCK and sel_a & sel_b:
        violations.append(f"{context}: overlapping selections under olr: {sorted(sel_a & sel_b)}")
    grab_a = session.users[0].grab
    grab_b = session.users[1].grab
    if (
        session.strategy is Strategy.ACTION_LOCK
        and grab_a is not None
        and grab_b is not None
        and grab_a.kind == grab_b.kind
        # pending selections receive no displacements; the restriction is on
        # the confirmed groups the two grabs act on
        and (session.users[0].group or frozenset()) & (session.users[1].group or frozenset())
    ):
        violations.append(f"{context}: concurrent {grab_a.kind.value} grabs on intersecting groups under alr")
    for uid in (0, 1):
        grab = session.users[uid].grab
        group = session.users[uid].group
        if grab is not None and (group is None or grab.vertex not in group):
            violations.append(f"{context}: user {uid} grab references a vertex outside their group")
    if session.strategy is not Strategy.OBJECT_LOCK and session.lock_table:
        violations.append(f"{context}: non-empty lock table under {session.strategy.value}")
    for i, p in session.model.vertices.items():
        if not p.is_finite():
            violations.append(f"{context}: vertex {i} became non-finite")
            break


def fuzz(seed: int, messages: int, strategy: Strategy, tick_every: int = 3) -> FuzzResult:
    """Throw random well-formed protocol messages at a session and check the
    strategy's safety invariants after every step."""
    from .scenariogen import gen_cube

    rng = random.Random(seed)
    session = Session(gen_cube(), gen_cube(), strategy)
    t = 0.0
    for user in (0, 1):
        session.handle_message(user, {"type": "join", "name": f"fuzz{user}"}, t)
    result = FuzzResult(messages=messages, denials=0, errors=0, ticks=0)
    ops = ["translate", "rotate", "scale"]
    for i in range(messages):
        t += rng.uniform(0.5, 12.0)
        user = rng.getrandbits(1)
        roll = rng.random()
        if roll < 0.25:
            msg = {"type": "select", "vertex": rng.randrange(8)}
        elif roll < 0.32:
            msg = {"type": "deselect", "vertex": rng.randrange(8)}
        elif roll < 0.45:
            msg = {"type": "confirm_group"}
        elif roll < 0.50:
            msg = {"type": "cancel_group"}
        elif roll < 0.60:
            msg = {"type": "set_op", "op": rng.choice(ops)}
        elif roll < 0.75:
            msg = {"type": "grab", "vertex": rng.randrange(8), "handle": _random_handle(rng)}
        elif roll < 0.93:
            msg = {"type": "move", "handle": _random_handle(rng)}
        elif roll < 0.98:
            msg = {"type": "release"}
        else:
            msg = {"type": "match_check"}
        for _, out in session.handle_message(user, msg, t):
            if out.get("type") == "deny":
                result.denials += 1
            elif out.get("type") == "error":
                result.errors += 1
        _check_safety(session, f"msg {i}", result.violations)
        if i % tick_every == tick_every - 1:
            t += 1.0
            session.advance_tick(t)
            result.ticks += 1
            _check_safety(session, f"tick after msg {i}", result.violations)
    return result
