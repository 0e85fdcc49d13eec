"""Figure rendering for metrics reports (PNG files, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import EpisodeKind, MetricsReport

CONCURRENT_COLOR = "#81b29a"
SAME_ACTION_COLOR = "#e07a5f"


def render_timeline(report: MetricsReport, path: str | Path) -> Path:
    """One row per model: concurrent episodes as wide bands, same-action
    sub-intervals overlaid as narrow bands."""
    fig, ax = plt.subplots(figsize=(9, 1.0 + 0.6 * len(report.models)))
    for row, stats in enumerate(report.models):
        concurrent = [e for e in stats.episodes if e.kind is EpisodeKind.CONCURRENT]
        same = [e for e in stats.episodes if e.kind is EpisodeKind.SAME_ACTION]
        ax.broken_barh(
            [(e.start_ms / 1000.0, e.duration_ms / 1000.0) for e in concurrent],
            (row - 0.3, 0.6),
            facecolors=CONCURRENT_COLOR,
        )
        ax.broken_barh(
            [(e.start_ms / 1000.0, e.duration_ms / 1000.0) for e in same],
            (row - 0.15, 0.3),
            facecolors=SAME_ACTION_COLOR,
        )
    ax.set_yticks(range(len(report.models)))
    ax.set_yticklabels([f"model {i}" for i in range(len(report.models))])
    ax.set_xlabel("session time (s)")
    ax.set_title("Concurrent control episodes (narrow band: same operation)")
    ax.invert_yaxis()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_summary(report: MetricsReport, path: str | Path) -> Path:
    """Bar panels for the four collaboration metrics."""
    fig, (ax_time, ax_ratio) = plt.subplots(1, 2, figsize=(9, 4))

    times = [
        ("mean completion", report.mean_completion_time_s),
        ("mean concurrent\nduration", report.mean_concurrent_duration_s),
    ]
    ratios = [
        ("concurrent\ntime ratio", report.concurrent_time_ratio),
        ("same-action\nconcurrent ratio", report.same_action_concurrent_ratio),
    ]
    for ax, entries, unit, limit in (
        (ax_time, times, "seconds", None),
        (ax_ratio, ratios, "ratio", 1.0),
    ):
        labels = [name for name, _ in entries]
        values = [0.0 if value is None else value for _, value in entries]
        bars = ax.bar(labels, values, color=[CONCURRENT_COLOR, SAME_ACTION_COLOR])
        for bar, (_, value) in zip(bars, entries):
            text = "n/a" if value is None else f"{value:.3g}"
            ax.annotate(
                text,
                (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                ha="center",
                va="bottom",
            )
        ax.set_ylabel(unit)
        if limit is not None:
            ax.set_ylim(0, limit * 1.15)
    fig.suptitle(f"Collaboration metrics over {report.n_models} model(s)")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_figures(report: MetricsReport, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        render_timeline(report, out_dir / "episodes_timeline.png"),
        render_summary(report, out_dir / "metrics_summary.png"),
    ]
