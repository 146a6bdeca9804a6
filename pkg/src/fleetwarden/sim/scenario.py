"""Scenario definitions for the simulated fleet.

A scenario pins everything that can vary: the machines and their scripted
activity traces, the watchlist, the policy, and a timeline of admin
actions. Scenarios load from YAML — either a full machine list with inline
traces, or `builtin: <name>` (seq-of-events walkthrough, the two-lab
deployment, the 180-machine suspicious sweep) with an optional seed.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..agent.sources import ScriptedWorld, parse_trace
from ..ledger.records import CommandKind
from ..policy.engine import PolicyConfig
from ..policy.schedule import parse_schedule

ALWAYS = "Mon-Sun 00:00-24:00"


class ScenarioError(ValueError):
    pass


@dataclass
class SimMachine:
    agent_id: str
    display_class: str
    address: str
    world: ScriptedWorld


@dataclass
class AdminAction:
    at: float
    action: str  # scan | view | detail | issue | quarantine | power_on | wake
    target: str | None = None
    kind: CommandKind | None = None
    args: dict[str, Any] = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    seed: int = 0
    duration: float = 300.0
    heartbeat_period: float = 30.0
    poll_period: float = 5.0
    refresh_period: float = 30.0
    idle_threshold: int = 600
    command_expiry: float = 300.0
    watchlist: list[str] = field(default_factory=list)
    policy: PolicyConfig | None = None
    machines: list[SimMachine] = field(default_factory=list)
    admin: list[AdminAction] = field(default_factory=list)

    def validate(self) -> "Scenario":
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")
        for period in (self.heartbeat_period, self.poll_period, self.refresh_period):
            if period <= 0:
                raise ScenarioError("periods must be positive")
        seen = set()
        for machine in self.machines:
            if machine.agent_id in seen:
                raise ScenarioError(f"duplicate machine {machine.agent_id!r}")
            seen.add(machine.agent_id)
        for action in self.admin:
            if action.at < 0 or action.at > self.duration:
                raise ScenarioError(f"admin action at {action.at} outside the timeline")
        return self


def _address_for(index: int) -> str:
    return f"10.0.{index // 250}.{index % 250 + 1}"


def _busy_trace(duration: float, step: float = 30.0) -> str:
    lines = [f"{t:g} input" for t in _times(0.0, duration, step)]
    return "\n".join(lines) + "\n"


def _times(start: float, end: float, step: float) -> list[float]:
    out, t = [], start
    while t <= end:
        out.append(t)
        t += step
    return out


# -- builtins


def seq7_scenario() -> Scenario:
    """The full admin walkthrough: boot, scan, list, inspect, shut down, confirm.

    pc-07 is selected and shut down; the final list no longer shows it
    among the active machines.
    """
    machines = []
    for i, name in enumerate(["lab1-pc05", "lab1-pc06", "lab1-pc07"]):
        trace = _busy_trace(240.0)
        trace += f"0 proc explorer {100 + i}\n0 proc editor {200 + i}\n"
        trace += f"0 traffic {1000 * (i + 1)} {500 * (i + 1)}\n"
        machines.append(
            SimMachine(
                agent_id=name,
                display_class="LCD",
                address=_address_for(i),
                world=parse_trace(trace),
            )
        )
    admin = [
        AdminAction(at=1.0, action="scan", args={"range": "10.0.0.1-3"}),
        AdminAction(at=2.0, action="view"),
        AdminAction(at=3.0, action="detail", target="lab1-pc07"),
        AdminAction(at=4.0, action="issue", target="lab1-pc07", kind=CommandKind.SHUTDOWN),
        AdminAction(at=200.0, action="view"),
    ]
    return Scenario(
        name="seq7",
        duration=240.0,
        machines=machines,
        admin=admin,
    ).validate()


def lab_scenario(seed: int = 8) -> Scenario:
    """Two-lab deployment: 110 machines (47 CRT, 63 LCD), ten-minute logoff rule.

    Roughly a third of the machines stop producing input early in the run;
    every machine that accumulates >= 600 s of inactivity is logged off
    exactly once.
    """
    rng = random.Random(seed)
    duration = 900.0
    machines = []
    for i in range(110):
        display = "CRT" if i < 47 else "LCD"
        agent = f"{'crt' if i < 47 else 'lcd'}-{i:03d}"
        if rng.random() < 0.35:
            # goes idle: input stops at some point early in the day
            last_input = rng.choice([0.0, 60.0, 120.0, 180.0, 240.0])
            events = [f"{t:g} input" for t in _times(0.0, last_input, 30.0)]
            trace = "\n".join(events) + "\n" if events else "0 input\n"
        else:
            trace = _busy_trace(duration)
        machines.append(
            SimMachine(
                agent_id=agent,
                display_class=display,
                address=_address_for(i),
                world=parse_trace(trace),
            )
        )
    policy = PolicyConfig(
        idle_threshold_seconds=600,
        idle_action=CommandKind.LOGOFF,
        work_hours=parse_schedule(ALWAYS),
        timezone="UTC",
    ).validate()
    return Scenario(
        name="lab110",
        seed=seed,
        duration=duration,
        poll_period=15.0,
        policy=policy,
        machines=machines,
        admin=[AdminAction(at=duration, action="view")],
    ).validate()


def suspicious_scenario(seed: int = 9) -> Scenario:
    """180 machines, exactly 38 of which run a watchlisted application."""
    rng = random.Random(seed)
    total, flagged_count = 180, 38
    flagged = set(rng.sample(range(total), flagged_count))
    machines = []
    for i in range(total):
        trace = "0 input\n0 proc editor 120\n0 proc browser 121\n"
        if i in flagged:
            trace += f"0 proc cryptominer.exe {400 + i}\n"
        machines.append(
            SimMachine(
                agent_id=f"pc-{i:03d}",
                display_class="LCD" if i % 2 else "CRT",
                address=_address_for(i),
                world=parse_trace(trace),
            )
        )
    return Scenario(
        name="fleet180",
        seed=seed,
        duration=90.0,
        watchlist=["cryptominer*"],
        machines=machines,
        admin=[AdminAction(at=90.0, action="view")],
    ).validate()


BUILTINS = {
    "seq7": lambda params: seq7_scenario(),
    "lab110": lambda params: lab_scenario(seed=int(params.get("seed", 8))),
    "fleet180": lambda params: suspicious_scenario(seed=int(params.get("seed", 9))),
}


# -- YAML loading


def _policy_of(data: Mapping[str, Any]) -> PolicyConfig:
    from ..controller.config import policy_from_mapping

    return policy_from_mapping(data)


def scenario_from_mapping(data: Mapping[str, Any]) -> Scenario:
    if "builtin" in data:
        name = str(data["builtin"])
        if name not in BUILTINS:
            raise ScenarioError(f"unknown builtin scenario {name!r}; have {sorted(BUILTINS)}")
        return BUILTINS[name](data)
    machines = []
    for index, raw in enumerate(data.get("machines") or []):
        machines.append(
            SimMachine(
                agent_id=str(raw["agent"]),
                display_class=str(raw.get("display_class", "LCD")),
                address=str(raw.get("address", _address_for(index))),
                world=parse_trace(str(raw.get("trace", "0 input\n"))),
            )
        )
    admin = []
    for raw in data.get("admin") or []:
        kind = raw.get("kind")
        admin.append(
            AdminAction(
                at=float(raw["at"]),
                action=str(raw["action"]),
                target=raw.get("target"),
                kind=CommandKind(str(kind).upper()) if kind else None,
                args={k: v for k, v in raw.items() if k not in ("at", "action", "target", "kind")},
            )
        )
    policy = _policy_of(data["policy"]) if data.get("policy") else None
    try:
        scenario = Scenario(
            name=str(data.get("name", "custom")),
            seed=int(data.get("seed", 0)),
            duration=float(data.get("duration", 300.0)),
            heartbeat_period=float(data.get("heartbeat_period", 30.0)),
            poll_period=float(data.get("poll_period", 5.0)),
            refresh_period=float(data.get("refresh_period", 30.0)),
            idle_threshold=int(data.get("idle_threshold", 600)),
            command_expiry=float(data.get("command_expiry", 300.0)),
            watchlist=[str(p) for p in (data.get("watchlist") or [])],
            policy=policy,
            machines=machines,
            admin=admin,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario: {exc}") from exc
    return scenario.validate()


def load_scenario(path: str | os.PathLike) -> Scenario:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"cannot parse scenario {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ScenarioError("scenario root must be a mapping")
    return scenario_from_mapping(data)
