"""`fleetsim`: run a scenario file and report what happened."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import assert_sequence, run_scenario, seq7_predicates
from .scenario import BUILTINS, ScenarioError, load_scenario, scenario_from_mapping


def cmd_run(args: argparse.Namespace) -> int:
    try:
        if args.scenario.startswith("builtin:"):
            scenario = scenario_from_mapping({"builtin": args.scenario.split(":", 1)[1]})
        else:
            scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    trace = run_scenario(scenario)
    if args.trace_out:
        Path(args.trace_out).write_bytes(trace.serialize())
    print(f"scenario {scenario.name}: {len(scenario.machines)} machines, "
          f"{len(trace.steps)} steps")
    for step in trace.steps[: args.show_steps]:
        print(f"  t={step.at:g} {step.kind} {step.detail}")
    if len(trace.steps) > args.show_steps:
        print(f"  ... {len(trace.steps) - args.show_steps} more steps")
    if scenario.name == "seq7":
        target = "lab1-pc07"
        result = assert_sequence(trace, seq7_predicates(target))
        verdict = "PASS" if result.ok else f"FAIL at: {result.first_unmatched}"
        print(f"sequence-of-events check ({target}): {verdict}")
        return 0 if result.ok else 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fleetsim", description="simulated fleet runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario YAML (or builtin:<name>)")
    p.add_argument("scenario", help=f"path to scenario YAML, or builtin:{'|'.join(sorted(BUILTINS))}")
    p.add_argument("--trace-out", help="write the full trace to this path")
    p.add_argument("--show-steps", type=int, default=12)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
