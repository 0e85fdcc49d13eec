"""Command-line entry point: model generation, live serving, scripted
simulation, replay, fuzzing, the brute-force oracle, and metrics reports."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import harness, metrics, oracle, plots, scenariogen
from .model import WireframeModel
from .resolution import Strategy
from .session import DEFAULT_TICK_HZ

STRATEGY_CHOICES = [s.value for s in Strategy]


def _add_strategy(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)


def cmd_gen(args: argparse.Namespace) -> int:
    base = scenariogen.gen_cube()
    spec = scenariogen.TargetSpec(
        seed=args.seed, faces_transformed=args.faces, ops_per_face=args.ops
    )
    target = scenariogen.gen_target(base, spec)
    base.save(args.out)
    target.save(args.target)
    print(f"wrote base model to {args.out} and target to {args.target}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    serve(
        model=WireframeModel.load(args.model),
        target=WireframeModel.load(args.target),
        strategy=Strategy(args.strategy),
        host=args.host,
        port=args.port,
        log_path=args.log,
        tick_hz=args.tick_hz,
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = harness.load_scenario(args.scenario)
    result = harness.run(scenario)
    harness.write_log(result.events, args.out)
    print(f"ticks: {result.tick_count}")
    print(f"denials: {result.deny_count}")
    print(f"final state hash: {result.final_hash}")
    print(f"log written to {args.out}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    events = harness.read_log(args.log)
    final = harness.replay(events)
    print(f"final state hash: {final.state_hash()}")
    if args.out_model:
        final.save(args.out_model)
        print(f"final model written to {args.out_model}")
    return 0


def cmd_fuzz(args: argparse.Namespace) -> int:
    result = harness.fuzz(args.seed, args.messages, Strategy(args.strategy))
    print(
        f"processed {result.messages} messages ({result.denials} denials, "
        f"{result.errors} errors, {result.ticks} ticks)"
    )
    if result.ok:
        print("no safety violations")
        return 0
    for violation in result.violations:
        print(f"VIOLATION: {violation}", file=sys.stderr)
    return 1


def cmd_oracle(args: argparse.Namespace) -> int:
    scenario = harness.load_scenario(args.scenario)
    final = oracle.oracle_resolve(scenario)
    print(f"oracle state hash: {final.state_hash()}")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    logs = [harness.read_log(path) for path in args.log]
    report = metrics.compute_metrics(logs)
    out = Path(args.out)
    out.write_text(json.dumps(report.to_obj(), indent=2) + "\n", encoding="utf-8")
    print(f"report written to {out}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["model", "completion_s", "concurrent_s", "same_action_s", "episode_count"]
            )
            for i, m in enumerate(report.models):
                writer.writerow(
                    [i, m.completion_s, m.concurrent_s, m.same_action_s, m.episode_count]
                )
        print(f"per-model table written to {args.csv}")
    if args.figures:
        for path in plots.render_figures(report, args.figures):
            print(f"figure written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cowire",
        description="collaborative wireframe editing engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a base cube and a non-matching target model")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--faces", type=int, default=2, help="faces to transform (>= 2)")
    p.add_argument("--ops", type=int, default=2, help="operations per face (>= 2)")
    p.add_argument("--out", required=True, help="base model output path")
    p.add_argument("--target", required=True, help="target model output path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="run the live two-client websocket server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    _add_strategy(p)
    p.add_argument("--model", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--log", required=True, help="event log output path (JSONL)")
    p.add_argument("--tick-hz", type=float, default=DEFAULT_TICK_HZ)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="run a scripted scenario deterministically")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="event log output path (JSONL)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="recompute the final state from an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--out-model", help="optionally write the replayed final model")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("fuzz", help="random protocol messages + safety invariant checks")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--messages", type=int, default=10000)
    _add_strategy(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("oracle", help="brute-force resolve a scenario (<= 8 vertices)")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("metrics", help="collaboration metrics from event logs")
    p.add_argument("--log", action="append", required=True, help="repeat for multiple models")
    p.add_argument("--out", required=True, help="JSON report output path")
    p.add_argument("--csv", help="optional per-model CSV table path")
    p.add_argument("--figures", help="optional directory for rendered figures")
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        OSError,
        harness.ScenarioError,
        harness.CorruptLogError,
        scenariogen.GenerationError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
