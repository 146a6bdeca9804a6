"""`agent` command line: run the daemon, print identity, or replay a trace."""

from __future__ import annotations

import argparse
import sys

from ..clock import FakeClock, SystemClock
from ..ledger.codec import encode_record
from ..ledger.filestore import FileLedger
from .config import ConfigError, load_agent_config
from .daemon import Agent, AgentSources
from .journal import FileJournal
from .platform_actions import LinuxPlatform, SimulatedPlatform
from .sources import (
    FileMtimeInputSource,
    PsutilProcessSource,
    PsutilTrafficSource,
    ScriptedInputSource,
    ScriptedProcessSource,
    ScriptedTrafficSource,
    TraceParseError,
    load_trace,
)


def _build_ledger(config, author: str):
    if config.ledger.mode == "file":
        return FileLedger(config.ledger.root, author=author)
    from ..ledger.httpclient import HttpLedger

    return HttpLedger(config.ledger.endpoint, token=config.auth_token, author=author)


def cmd_run(args: argparse.Namespace) -> int:
    from pathlib import Path

    from filelock import FileLock, Timeout

    config = load_agent_config(args.config)
    state_dir = Path(config.state_dir)
    state_dir.mkdir(parents=True, exist_ok=True)
    lock = FileLock(state_dir / "agent.lock")
    try:
        lock.acquire(timeout=0)
    except Timeout:
        print(f"another agent instance already runs for state dir {state_dir}", file=sys.stderr)
        return 1
    with lock:
        agent = Agent(
            config=config,
            ledger=_build_ledger(config, config.agent_id),
            clock=SystemClock(),
            sources=AgentSources(
                input=FileMtimeInputSource(config.input_watch or None),
                processes=PsutilProcessSource(),
                traffic=PsutilTrafficSource(),
            ),
            platform=LinuxPlatform(dry_run=args.dry_run),
            journal=FileJournal(state_dir / "journal.log"),
        )
        print(f"agent {config.agent_id} reporting every {config.heartbeat_period_seconds}s")
        agent.run()
    return 0


def cmd_id(args: argparse.Namespace) -> int:
    config = load_agent_config(args.config)
    print(config.agent_id)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        world = load_trace(args.trace)
    except TraceParseError as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.config:
        config = load_agent_config(args.config)
    else:
        from .config import AgentConfig

        config = AgentConfig(agent_id=args.agent_id).validate()
    if args.threshold:
        config.idle_threshold_seconds = args.threshold

    clock = FakeClock(0.0)
    from ..ledger.memory import MemoryLedger

    agent = Agent(
        config=config,
        ledger=MemoryLedger(),
        clock=clock,
        sources=AgentSources(
            input=ScriptedInputSource(world, clock),
            processes=ScriptedProcessSource(world, clock),
            traffic=ScriptedTrafficSource(world, clock),
        ),
        platform=SimulatedPlatform(),
    )
    last_event = 0.0
    for times in (world.input_times, [t for t, _ in world.proc_events], [t for t, _ in world.traffic_events]):
        if times:
            last_event = max(last_event, max(times))
    duration = args.duration if args.duration is not None else last_event + config.heartbeat_period_seconds
    t = 0.0
    while t <= duration:
        clock.set_time(t)
        entry = agent.heartbeat_tick()
        if entry is not None:
            sys.stdout.write(encode_record(entry).decode("utf-8"))
        t += config.heartbeat_period_seconds
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agent", description="fleet machine agent")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the agent daemon")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--dry-run", action="store_true", help="log platform actions instead of executing")
    p_run.set_defaults(func=cmd_run)

    p_id = sub.add_parser("id", help="print this agent's id")
    p_id.add_argument("--config", required=True)
    p_id.set_defaults(func=cmd_id)

    p_sim = sub.add_parser("simulate", help="replay a scripted trace and print heartbeats")
    p_sim.add_argument("--trace", required=True)
    p_sim.add_argument("--config")
    p_sim.add_argument("--agent-id", default="sim-agent")
    p_sim.add_argument("--duration", type=float, default=None)
    p_sim.add_argument("--threshold", type=int, default=None)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
