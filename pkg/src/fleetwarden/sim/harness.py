"""Deterministic scenario runner.

Agents here are the production Agent class on scripted sources and a
simulated platform; the controller is the production Controller. The only
non-production pieces are the fake clock and the scheduler, which fires
every periodic duty at explicit tick times in a fixed order (heartbeats,
then controller refresh, then admin actions, then command polls), so a
scenario plus a seed always produces a byte-identical trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from ..agent.config import AgentConfig
from ..agent.daemon import Agent, AgentSources
from ..agent.platform_actions import SimulatedPlatform
from ..agent.sources import ScriptedInputSource, ScriptedProcessSource, ScriptedTrafficSource
from ..clock import FakeClock
from ..controller.fleetview import StalenessWindows, Watchlist
from ..controller.scan import FixtureProber
from ..controller.service import Controller
from ..ledger.codec import encode_record
from ..ledger.memory import MemoryLedger
from ..ledger.records import CommandKind, CommandState
from ..persistence.store import MemoryEventStore
from .scenario import Scenario

# step kinds, in the order the admin walkthrough produces them
STARTUP_RETRIEVAL = "STARTUP_RETRIEVAL"
SCAN_COMPLETED = "SCAN_COMPLETED"
LIST_DISPLAYED = "LIST_DISPLAYED"
DETAIL_ACCESSED = "DETAIL_ACCESSED"
ACTION_ISSUED = "ACTION_ISSUED"
COMMAND_EXECUTED = "COMMAND_EXECUTED"
COMMAND_FAILED = "COMMAND_FAILED"
ACK_CONFIRMED = "ACK_CONFIRMED"
QUARANTINE_SET = "QUARANTINE_SET"

_PRIORITY_HEARTBEAT = 1
_PRIORITY_REFRESH = 2
_PRIORITY_ADMIN = 3
_PRIORITY_POLL = 4


@dataclass(frozen=True)
class TraceStep:
    at: float
    kind: str
    detail: dict

    def line(self) -> str:
        return f"STEP {self.at:g} {self.kind} {json.dumps(self.detail, sort_keys=True)}"


@dataclass
class SimTrace:
    scenario_name: str
    steps: list[TraceStep] = field(default_factory=list)
    invocations: dict[str, list[str]] = field(default_factory=dict)  # agent -> kinds
    ledger: MemoryLedger | None = None
    store: MemoryEventStore | None = None
    controller: Controller | None = None

    def steps_of(self, kind: str) -> list[TraceStep]:
        return [s for s in self.steps if s.kind == kind]

    def serialize(self) -> bytes:
        lines = [f"TRACE {self.scenario_name}"]
        lines += [step.line() for step in self.steps]
        if self.ledger is not None:
            records, _ = self.ledger.read_new()
            lines += ["RECORD " + encode_record(r).decode().rstrip("\n") for r in records]
        if self.store is not None:
            for event in self.store.events():
                lines.append(
                    "EVENT "
                    + json.dumps(
                        {
                            "id": event.event_id,
                            "at": event.at,
                            "kind": event.kind.value,
                            "agent": event.agent,
                            "payload": event.payload,
                        },
                        sort_keys=True,
                    )
                )
        return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass(frozen=True)
class Predicate:
    name: str
    matches: Callable[[TraceStep], bool]


@dataclass(frozen=True)
class SequenceResult:
    ok: bool
    matched: int
    first_unmatched: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def assert_sequence(trace: SimTrace, predicates: list[Predicate]) -> SequenceResult:
    """Do the predicates match an ordered subsequence of the trace steps?"""
    index = 0
    for step in trace.steps:
        if index >= len(predicates):
            break
        if predicates[index].matches(step):
            index += 1
    if index == len(predicates):
        return SequenceResult(ok=True, matched=index)
    return SequenceResult(ok=False, matched=index, first_unmatched=predicates[index].name)


class SimWorld:
    """One scenario's machines, controller, and scheduler."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.clock = FakeClock(0.0)
        self.ledger = MemoryLedger()
        self.store = MemoryEventStore()
        counter = iter(range(1_000_000))
        self.controller = Controller(
            ledger=self.ledger,
            store=self.store,
            clock=self.clock,
            policy=scenario.policy,
            watchlist=Watchlist.of(scenario.watchlist),
            windows=StalenessWindows.for_heartbeat_period(scenario.heartbeat_period),
            prober=FixtureProber(alive={m.address for m in scenario.machines}),
            command_expiry=scenario.command_expiry,
            id_factory=lambda: f"cmd-{next(counter):06d}",
        )
        self.agents: dict[str, Agent] = {}
        self.platforms: dict[str, SimulatedPlatform] = {}
        for machine in scenario.machines:
            platform = SimulatedPlatform()
            config = AgentConfig(
                agent_id=machine.agent_id,
                idle_threshold_seconds=scenario.idle_threshold,
                heartbeat_period_seconds=int(scenario.heartbeat_period),
                command_poll_period_seconds=int(scenario.poll_period),
            ).validate()
            agent = Agent(
                config=config,
                ledger=self.ledger.for_author(machine.agent_id),
                clock=self.clock,
                sources=AgentSources(
                    input=ScriptedInputSource(machine.world, self.clock),
                    processes=ScriptedProcessSource(machine.world, self.clock),
                    traffic=ScriptedTrafficSource(machine.world, self.clock),
                ),
                platform=platform,
            )
            self.agents[machine.agent_id] = agent
            self.platforms[machine.agent_id] = platform
            self.controller.register_machine(
                machine.agent_id, machine.address, machine.display_class
            )

    def run(self) -> SimTrace:
        scenario = self.scenario
        trace = SimTrace(
            scenario_name=scenario.name,
            ledger=self.ledger,
            store=self.store,
            controller=self.controller,
        )

        # the controller's first duty: recover state, read what the fleet left behind
        records, _ = self.ledger.read_new()
        trace.steps.append(
            TraceStep(
                at=0.0,
                kind=STARTUP_RETRIEVAL,
                detail={"machines": len(self.controller.registry), "records": len(records)},
            )
        )

        ticks: list[tuple[float, int, str]] = []
        for agent_id in sorted(self.agents):
            for t in _times(0.0, scenario.duration, scenario.heartbeat_period):
                ticks.append((t, _PRIORITY_HEARTBEAT, agent_id))
            for t in _times(0.0, scenario.duration, scenario.poll_period):
                ticks.append((t, _PRIORITY_POLL, agent_id))
        for t in _times(0.0, scenario.duration, scenario.refresh_period):
            ticks.append((t, _PRIORITY_REFRESH, ""))
        for index, action in enumerate(scenario.admin):
            ticks.append((action.at, _PRIORITY_ADMIN, f"{index:06d}"))
        ticks.sort()

        for at, priority, key in ticks:
            self.clock.set_time(max(self.clock.now(), at))
            if priority == _PRIORITY_HEARTBEAT:
                self.agents[key].heartbeat_tick()
            elif priority == _PRIORITY_REFRESH:
                self._refresh(trace, at)
            elif priority == _PRIORITY_ADMIN:
                self._admin(trace, scenario.admin[int(key)])
            elif priority == _PRIORITY_POLL:
                executed = self.agents[key].poll_tick()
                for command_id in executed:
                    trace.steps.append(
                        TraceStep(at=at, kind=COMMAND_EXECUTED,
                                  detail={"agent": key, "command_id": command_id})
                    )
        self._refresh(trace, scenario.duration)  # final pass records late transitions
        trace.invocations = {
            agent: [k.value for k in platform.invocations]
            for agent, platform in sorted(self.platforms.items())
        }
        return trace

    def _refresh(self, trace: SimTrace, at: float) -> None:
        before = len(self.controller.history())
        report = self.controller.refresh()
        for event in self.controller.history()[before:]:
            if event.kind.value == "COMMAND_TRANSITIONED":
                step_kind = ACK_CONFIRMED if event.payload.get("state") == "EXECUTED" else None
                if step_kind:
                    trace.steps.append(
                        TraceStep(
                            at=at,
                            kind=step_kind,
                            detail={
                                "agent": event.agent,
                                "command_id": event.payload.get("command_id"),
                                "state": event.payload.get("state"),
                            },
                        )
                    )
        for agent, kind in report.policy_issued:
            trace.steps.append(
                TraceStep(at=at, kind=ACTION_ISSUED,
                          detail={"agent": agent, "kind": kind.value, "origin": "policy"})
            )

    def _admin(self, trace: SimTrace, action) -> None:
        at = self.clock.now()
        if action.action == "scan":
            alive = self.controller.scan(action.args.get("range", ""))
            trace.steps.append(TraceStep(at=at, kind=SCAN_COMPLETED, detail={"alive": alive}))
        elif action.action == "view":
            view = self.controller.fleet_view()
            active = sorted(
                row.machine.agent for row in view.rows if row.liveness.value == "ACTIVE"
            )
            trace.steps.append(
                TraceStep(at=at, kind=LIST_DISPLAYED,
                          detail={"rows": len(view.rows), "active": active})
            )
        elif action.action == "detail":
            detail = self.controller.machine_detail(action.target)
            trace.steps.append(
                TraceStep(
                    at=at,
                    kind=DETAIL_ACCESSED,
                    detail={
                        "agent": action.target,
                        "processes": len(detail["latest"].processes) if detail["latest"] else 0,
                        "rx_bytes": detail["latest"].traffic.rx_bytes if detail["latest"] else 0,
                    },
                )
            )
        elif action.action == "issue":
            command = self.controller.issue_action(action.target, action.kind)
            trace.steps.append(
                TraceStep(
                    at=at,
                    kind=ACTION_ISSUED,
                    detail={"agent": action.target, "kind": action.kind.value,
                            "command_id": command.command_id, "origin": "admin"},
                )
            )
        elif action.action == "quarantine":
            record = self.controller.quarantine(action.target, bool(action.args.get("on", True)))
            trace.steps.append(
                TraceStep(at=at, kind=QUARANTINE_SET,
                          detail={"agent": action.target, "on": record.quarantined})
            )
        elif action.action == "power_on":
            self.agents[action.target].power_on()
        elif action.action == "wake":
            self.agents[action.target].wake()
        else:
            raise ValueError(f"unknown admin action {action.action!r}")


def _times(start: float, end: float, step: float) -> list[float]:
    out, t = [], start
    while t <= end:
        out.append(t)
        t += step
    return out


def run_scenario(scenario: Scenario) -> SimTrace:
    return SimWorld(scenario).run()


def seq7_predicates(target: str) -> list[Predicate]:
    """The eight-step admin walkthrough as ordered predicates."""
    return [
        Predicate("startup retrieval", lambda s: s.kind == STARTUP_RETRIEVAL),
        Predicate("network scan", lambda s: s.kind == SCAN_COMPLETED and bool(s.detail["alive"])),
        Predicate(
            "list displayed with target active",
            lambda s: s.kind == LIST_DISPLAYED and target in s.detail["active"],
        ),
        Predicate(
            "target detail accessed",
            lambda s: s.kind == DETAIL_ACCESSED and s.detail["agent"] == target,
        ),
        Predicate(
            "action issued to target",
            lambda s: s.kind == ACTION_ISSUED and s.detail["agent"] == target,
        ),
        Predicate(
            "agent executed the action",
            lambda s: s.kind == COMMAND_EXECUTED and s.detail["agent"] == target,
        ),
        Predicate(
            "acknowledgement recorded",
            lambda s: s.kind == ACK_CONFIRMED and s.detail["agent"] == target,
        ),
        Predicate(
            "updated list excludes target",
            lambda s: s.kind == LIST_DISPLAYED and target not in s.detail["active"],
        ),
    ]


def command_conservation(trace: SimTrace) -> list[str]:
    """command_ids issued without exactly one terminal transition by trace end."""
    assert trace.ledger is not None
    histories: dict[str, list[CommandState]] = {}
    for command in trace.ledger.read_commands():
        histories.setdefault(command.command_id, []).append(command.state)
    bad = []
    for command_id, states in histories.items():
        terminal = [s for s in states if s is not CommandState.PENDING]
        if len(terminal) != 1 or states[0] is not CommandState.PENDING:
            bad.append(command_id)
    return bad
