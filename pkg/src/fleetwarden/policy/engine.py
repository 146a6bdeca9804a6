"""Automated power policy.

Turns a fleet view into commands: hibernate/log off machines whose idle
time has crossed the admin threshold, and shut machines down outside work
hours. After-hours beats idle; at most one command per machine per round;
quarantined, stale, offline and freshly-booted machines are left alone, as
is any machine that already has an open command.

An idle action is only issued once per idle episode: if any command was
already issued after the machine's last input (the start of the current
idle stretch), the episode has been handled and is not re-fired, which is
what keeps a logged-off machine from being logged off forever.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from zoneinfo import ZoneInfo

from ..controller.fleetview import FleetRow, FleetView, Liveness
from ..ledger.records import AgentId, CommandEntry, CommandKind, CommandState, Status
from .schedule import WeeklySchedule, parse_schedule

DEFAULT_WORK_HOURS = "Mon-Fri 08:00-18:00"


@dataclass
class PolicyConfig:
    idle_threshold_seconds: int = 600
    idle_action: CommandKind = CommandKind.HIBERNATE
    work_hours: WeeklySchedule = field(default_factory=lambda: parse_schedule(DEFAULT_WORK_HOURS))
    after_hours_action: CommandKind = CommandKind.SHUTDOWN
    grace_after_boot_seconds: int = 600
    enabled: bool = True
    timezone: str | None = None  # IANA zone for work_hours; None = system local

    def validate(self) -> "PolicyConfig":
        if self.idle_threshold_seconds <= 0:
            raise ValueError("idle_threshold_seconds must be positive")
        if self.grace_after_boot_seconds <= 0:
            raise ValueError("grace_after_boot_seconds must be positive")
        if self.timezone is not None:
            ZoneInfo(self.timezone)
        return self

    def local_time(self, now: float) -> datetime:
        if self.timezone is None:
            return datetime.fromtimestamp(now).astimezone()
        if self.timezone.upper() == "UTC":
            return datetime.fromtimestamp(now, tz=timezone.utc)
        return datetime.fromtimestamp(now, tz=ZoneInfo(self.timezone))


def _idle_episode_started(row: FleetRow) -> float:
    entry = row.latest
    assert entry is not None
    return max(0.0, entry.timestamp - entry.idle_seconds)


def _has_open_command(agent: AgentId, commands: list[CommandEntry]) -> bool:
    return any(c.target == agent and c.state is CommandState.PENDING for c in commands)


def _awaiting_fresh_heartbeat(row: FleetRow, commands: list[CommandEntry]) -> bool:
    # A command newer than the last heartbeat means its outcome is not
    # visible yet; wait for the machine to report (or go stale) first.
    assert row.latest is not None
    return any(
        c.target == row.machine.agent and c.issued_at >= row.latest.timestamp for c in commands
    )


def _episode_already_handled(row: FleetRow, commands: list[CommandEntry]) -> bool:
    started = _idle_episode_started(row)
    return any(c.target == row.machine.agent and c.issued_at >= started for c in commands)


def evaluate(
    view: FleetView,
    config: PolicyConfig,
    open_commands: list[CommandEntry],
    now: float,
) -> list[tuple[AgentId, CommandKind]]:
    """Commands this round would issue; deterministic, at most one per machine.

    `open_commands` is the current command set (any state): PENDING entries
    suppress everything for their target, and terminal entries suppress
    re-firing the idle action within the same idle episode.
    """
    if not config.enabled:
        return []
    after_hours = not config.work_hours.covers(config.local_time(now))
    out: list[tuple[AgentId, CommandKind]] = []
    for row in view.rows:
        agent = row.machine.agent
        if row.liveness is not Liveness.ACTIVE or row.machine.quarantined:
            continue
        if row.latest is None:
            continue
        if _has_open_command(agent, open_commands):
            continue
        if _awaiting_fresh_heartbeat(row, open_commands):
            continue
        if row.booted_at is not None and now - row.booted_at < config.grace_after_boot_seconds:
            continue
        if after_hours:
            out.append((agent, config.after_hours_action))
        elif (
            row.latest.status is Status.IDLE
            and row.latest.idle_seconds >= config.idle_threshold_seconds
            and not _episode_already_handled(row, open_commands)
        ):
            out.append((agent, config.idle_action))
    out.sort(key=lambda pair: pair[0])
    return out
