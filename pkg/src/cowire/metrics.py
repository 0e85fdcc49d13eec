"""Objective collaboration metrics computed from session event logs.

A concurrent-control episode is a maximal interval during which both users'
confirmed groups exist and intersect; its same-action sub-intervals are
where both users additionally hold grabs of the same operation kind. From
per-model logs we report:

- mean completion time: average of the per-model completion times,
- concurrent time ratio: total concurrent time over total task time,
- same-action concurrent ratio: same-action time over concurrent time,
- mean concurrent duration: concurrent time over episode count.

Ratios whose denominator is zero are reported as undefined (None/null),
never as zero. All reported durations are seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .harness import bootstrap_from_log
from .session import SessionEvent


class EpisodeKind(Enum):
    CONCURRENT = "concurrent"
    SAME_ACTION = "same_action"


@dataclass(frozen=True)
class Episode:
    start_ms: float
    end_ms: float
    kind: EpisodeKind

    @property
    def duration_ms(self) -> float:
        return self.end_ms - self.start_ms

    def to_obj(self) -> dict:
        return {"start_ms": self.start_ms, "end_ms": self.end_ms, "kind": self.kind.value}


class _IntervalTracker:
    """Turns a sampled boolean timeline into maximal closed intervals."""

    def __init__(self, kind: EpisodeKind):
        self.kind = kind
        self.open_since: float | None = None
        self.intervals: list[Episode] = []

    def sample(self, active: bool, t_ms: float) -> None:
        if active and self.open_since is None:
            self.open_since = t_ms
        elif not active and self.open_since is not None:
            self._close(t_ms)

    def finish(self, t_ms: float) -> list[Episode]:
        if self.open_since is not None:
            self._close(t_ms)
        return self.intervals

    def _close(self, t_ms: float) -> None:
        if t_ms > self.open_since:
            self.intervals.append(Episode(self.open_since, t_ms, self.kind))
        self.open_since = None


def detect_episodes(events: list[SessionEvent]) -> list[Episode]:
    """Concurrent and same-action episodes of one session log.

    The log is replayed through the real session state machine, so denied
    messages have no effect here either. An episode still open at the end of
    the log is closed at the final event timestamp.
    """
    session = bootstrap_from_log(events)
    concurrent = _IntervalTracker(EpisodeKind.CONCURRENT)
    same_action = _IntervalTracker(EpisodeKind.SAME_ACTION)
    applied_ticks: set[int] = set()
    for ev in events:
        if ev.dir == "in":
            session.handle_message(ev.user, ev.msg, ev.t_ms)
        elif ev.msg.get("type") == "state":
            tick = ev.msg["tick"]
            if tick not in applied_ticks:
                applied_ticks.add(tick)
                session.advance_tick(ev.t_ms)
        group_a = session.users[0].group
        group_b = session.users[1].group
        overlapping = group_a is not None and group_b is not None and bool(group_a & group_b)
        grab_a = session.users[0].grab
        grab_b = session.users[1].grab
        same = (
            overlapping
            and grab_a is not None
            and grab_b is not None
            and grab_a.kind == grab_b.kind
        )
        concurrent.sample(overlapping, ev.t_ms)
        same_action.sample(same, ev.t_ms)
    end = events[-1].t_ms
    return concurrent.finish(end) + same_action.finish(end)


@dataclass
class ModelStats:
    completion_s: float
    concurrent_s: float
    same_action_s: float
    episode_count: int
    episodes: list[Episode] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "completion_s": self.completion_s,
            "concurrent_s": self.concurrent_s,
            "same_action_s": self.same_action_s,
            "episode_count": self.episode_count,
            "episodes": [e.to_obj() for e in self.episodes],
        }


@dataclass
class MetricsReport:
    models: list[ModelStats]
    total_time_s: float
    mean_completion_time_s: float
    concurrent_time_ratio: float | None
    same_action_concurrent_ratio: float | None
    mean_concurrent_duration_s: float | None

    @property
    def n_models(self) -> int:
        return len(self.models)

    def to_obj(self) -> dict:
        return {
            "n_models": self.n_models,
            "models": [m.to_obj() for m in self.models],
            "total_time_s": self.total_time_s,
            "mean_completion_time_s": self.mean_completion_time_s,
            "concurrent_time_ratio": self.concurrent_time_ratio,
            "same_action_concurrent_ratio": self.same_action_concurrent_ratio,
            "mean_concurrent_duration_s": self.mean_concurrent_duration_s,
        }


def _truncate_at_success(events: list[SessionEvent]) -> list[SessionEvent]:
    """Cut the log at the first successful match (the completion point);
    an unmatched log counts in full, as an abort."""
    for idx, ev in enumerate(events):
        if ev.dir == "out" and ev.msg.get("type") == "match_result" and ev.msg.get("matched"):
            return events[: idx + 1]
    return events


def compute_metrics(per_model_logs: list[list[SessionEvent]]) -> MetricsReport:
    if not per_model_logs:
        raise ValueError("at least one model log is required")
    models = []
    for events in per_model_logs:
        if not events:
            raise ValueError("empty model log")
        events = _truncate_at_success(events)
        start = events[0].t_ms
        end = events[-1].t_ms
        episodes = detect_episodes(events)
        concurrent = [e for e in episodes if e.kind is EpisodeKind.CONCURRENT]
        same = [e for e in episodes if e.kind is EpisodeKind.SAME_ACTION]
        models.append(
            ModelStats(
                completion_s=(end - start) / 1000.0,
                concurrent_s=sum(e.duration_ms for e in concurrent) / 1000.0,
                same_action_s=sum(e.duration_ms for e in same) / 1000.0,
                episode_count=len(concurrent),
                episodes=episodes,
            )
        )
    total = sum(m.completion_s for m in models)
    total_concurrent = sum(m.concurrent_s for m in models)
    total_same = sum(m.same_action_s for m in models)
    total_episodes = sum(m.episode_count for m in models)
    return MetricsReport(
        models=models,
        total_time_s=total,
        mean_completion_time_s=total / len(models),
        concurrent_time_ratio=total_concurrent / total if total > 0 else None,
        same_action_concurrent_ratio=total_same / total_concurrent if total_concurrent > 0 else None,
        mean_concurrent_duration_s=total_concurrent / total_episodes if total_episodes > 0 else None,
    )
