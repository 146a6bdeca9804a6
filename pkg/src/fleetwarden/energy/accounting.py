"""Energy integration over machine state timelines.

Energy is the sum of draw(state) x duration over non-overlapping per-agent
intervals, in double-precision watt-hours; reports render at one decimal.
Timelines are derived from the only ground truth available, the ledger:
heartbeats hold their status until the next one, an executed hibernate
puts the machine to SLEEP until the next heartbeat, an executed shutdown
puts it OFF until the next fresh-boot (seq 0) heartbeat, and unobserved
time is OFF.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..ledger.records import AgentId, CommandEntry, CommandKind, Status, StatusEntry
from .model import MachineState, PowerModel

SECONDS_PER_HOUR = 3600.0


class TimelineError(ValueError):
    pass


@dataclass(frozen=True)
class StateInterval:
    agent: AgentId
    state: MachineState
    start: float
    end: float

    def __post_init__(self):
        if self.end < self.start:
            raise TimelineError(f"interval for {self.agent} ends before it starts")

    @property
    def duration_hours(self) -> float:
        return (self.end - self.start) / SECONDS_PER_HOUR


@dataclass(frozen=True)
class EnergyBreakdown:
    per_agent_wh: dict[AgentId, float]
    total_wh: float


def _check_no_overlap(intervals: Iterable[StateInterval]) -> None:
    by_agent: dict[AgentId, list[StateInterval]] = {}
    for interval in intervals:
        by_agent.setdefault(interval.agent, []).append(interval)
    for agent, rows in by_agent.items():
        rows.sort(key=lambda r: (r.start, r.end))
        for prev, cur in zip(rows, rows[1:]):
            if cur.start < prev.end:
                raise TimelineError(
                    f"overlapping intervals for {agent}: "
                    f"[{prev.start}, {prev.end}) and [{cur.start}, {cur.end})"
                )


def energy_wh(
    intervals: Iterable[StateInterval], models: Mapping[AgentId, PowerModel]
) -> EnergyBreakdown:
    """Watt-hours per agent and fleet total; rejects overlapping timelines."""
    intervals = list(intervals)
    _check_no_overlap(intervals)
    per_agent: dict[AgentId, float] = {}
    for interval in intervals:
        model = models[interval.agent]
        wh = model.draw(interval.state) * interval.duration_hours
        per_agent[interval.agent] = per_agent.get(interval.agent, 0.0) + wh
    return EnergyBreakdown(per_agent_wh=per_agent, total_wh=sum(per_agent.values()))


@dataclass(frozen=True)
class SavingsReport:
    baseline_wh: float
    actual_wh: float
    saved_wh: float
    saved_fraction: float
    per_agent_saved_wh: dict[AgentId, float] = field(default_factory=dict)


def _span(intervals: list[StateInterval]) -> tuple[float, float] | None:
    if not intervals:
        return None
    return min(i.start for i in intervals), max(i.end for i in intervals)


def savings_report(
    baseline_intervals: Iterable[StateInterval],
    actual_intervals: Iterable[StateInterval],
    models: Mapping[AgentId, PowerModel],
) -> SavingsReport:
    """Baseline minus actual; both timelines must cover the same span per agent."""
    baseline = list(baseline_intervals)
    actual = list(actual_intervals)
    base_by_agent: dict[AgentId, list[StateInterval]] = {}
    act_by_agent: dict[AgentId, list[StateInterval]] = {}
    for interval in baseline:
        base_by_agent.setdefault(interval.agent, []).append(interval)
    for interval in actual:
        act_by_agent.setdefault(interval.agent, []).append(interval)
    for agent in set(base_by_agent) | set(act_by_agent):
        b, a = _span(base_by_agent.get(agent, [])), _span(act_by_agent.get(agent, []))
        if b != a:
            raise TimelineError(f"span mismatch for {agent}: baseline {b} vs actual {a}")
    base_energy = energy_wh(baseline, models)
    actual_energy = energy_wh(actual, models)
    saved = base_energy.total_wh - actual_energy.total_wh
    fraction = saved / base_energy.total_wh if base_energy.total_wh > 0 else 0.0
    per_agent = {
        agent: base_energy.per_agent_wh.get(agent, 0.0) - actual_energy.per_agent_wh.get(agent, 0.0)
        for agent in set(base_energy.per_agent_wh) | set(actual_energy.per_agent_wh)
    }
    return SavingsReport(
        baseline_wh=base_energy.total_wh,
        actual_wh=actual_energy.total_wh,
        saved_wh=saved,
        saved_fraction=fraction,
        per_agent_saved_wh=per_agent,
    )


def _status_state(status: Status) -> MachineState:
    return MachineState.IDLE if status is Status.IDLE else MachineState.ACTIVE


def derive_state_intervals(
    entries: Iterable[StatusEntry],
    executed_commands: Iterable[tuple[CommandEntry, float]] = (),
    since: float | None = None,
    until: float | None = None,
) -> list[StateInterval]:
    """Per-agent timeline from heartbeats plus executed power commands.

    `executed_commands` pairs each EXECUTED command with the time its
    execution was observed. Gaps before the first heartbeat and after a
    shutdown count as OFF; hibernation counts as SLEEP until the machine
    reports again.
    """
    by_agent: dict[AgentId, list[StatusEntry]] = {}
    for entry in entries:
        by_agent.setdefault(entry.agent, []).append(entry)
    power_cmds: dict[AgentId, list[tuple[float, CommandKind]]] = {}
    for command, at in executed_commands:
        if command.kind in (CommandKind.SHUTDOWN, CommandKind.HIBERNATE):
            power_cmds.setdefault(command.target, []).append((at, command.kind))

    intervals: list[StateInterval] = []
    for agent, rows in by_agent.items():
        rows.sort(key=lambda e: (e.timestamp, e.seq))
        cuts = sorted(power_cmds.get(agent, []))
        span_start = since if since is not None else rows[0].timestamp
        span_end = until if until is not None else rows[-1].timestamp
        if span_end <= span_start:
            continue

        # Build (time, state) change points across the span.
        points: list[tuple[float, MachineState]] = [(span_start, MachineState.OFF)]
        for entry in rows:
            points.append((entry.timestamp, _status_state(entry.status)))
        for at, kind in cuts:
            down = MachineState.OFF if kind is CommandKind.SHUTDOWN else MachineState.SLEEP
            points.append((at, down))
        points.sort(key=lambda p: p[0])

        current_state = MachineState.OFF
        current_start = span_start
        for at, state in points:
            if at <= span_start:
                current_state = state
                continue
            if at >= span_end:
                break
            if state is not current_state:
                if at > current_start:
                    intervals.append(StateInterval(agent, current_state, current_start, at))
                current_state = state
                current_start = at
        if span_end > current_start:
            intervals.append(StateInterval(agent, current_state, current_start, span_end))
    return intervals


def always_on_baseline(
    actual_intervals: Iterable[StateInterval],
) -> list[StateInterval]:
    """A baseline where every machine stays ACTIVE over its observed span."""
    by_agent: dict[AgentId, list[StateInterval]] = {}
    for interval in actual_intervals:
        by_agent.setdefault(interval.agent, []).append(interval)
    out = []
    for agent, rows in by_agent.items():
        span = _span(rows)
        if span is not None and span[1] > span[0]:
            out.append(StateInterval(agent, MachineState.ACTIVE, span[0], span[1]))
    return out


def energy_from_summaries(
    summaries: Iterable[tuple[AgentId, Mapping[str, float]]],
    models: Mapping[AgentId, PowerModel],
) -> EnergyBreakdown:
    """Energy from HEARTBEAT_SUMMARY occupancy-seconds payloads.

    Unaccounted period time is treated as OFF, matching the timeline rule
    for unobserved gaps.
    """
    per_agent: dict[AgentId, float] = {}
    for agent, occupancy in summaries:
        model = models[agent]
        wh = 0.0
        for state_name, seconds in occupancy.items():
            wh += model.draw(MachineState(state_name)) * (seconds / SECONDS_PER_HOUR)
        per_agent[agent] = per_agent.get(agent, 0.0) + wh
    return EnergyBreakdown(per_agent_wh=per_agent, total_wh=sum(per_agent.values()))
