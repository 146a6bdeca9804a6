"""The admin's aggregated view of the fleet.

One row per registered machine, always: a machine that has never spoken
shows as OFFLINE rather than missing. Liveness is derived from heartbeat
staleness (agents never report OFFLINE themselves), suspicious process
matches come from the watchlist, and the whole view is a pure function of
its inputs so the same snapshot always renders the same table.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from enum import Enum

from ..ledger.records import AgentId, CommandEntry, CommandState, CommandKind, ProcessInfo, StatusEntry
from .registry import MachineRecord

DEFAULT_HEARTBEAT_PERIOD = 30.0
STALE_MULTIPLIER = 3.0
OFFLINE_MULTIPLIER = 10.0


class Liveness(str, Enum):
    ACTIVE = "ACTIVE"
    STALE = "STALE"
    OFFLINE = "OFFLINE"


class AckStatus(str, Enum):
    ACKNOWLEDGED = "ACKNOWLEDGED"
    AWAITING = "AWAITING"


@dataclass(frozen=True)
class Watchlist:
    """Case-insensitive process-name globs marking suspicious applications."""

    patterns: tuple[str, ...] = ()

    @classmethod
    def of(cls, patterns) -> "Watchlist":
        seen = []
        for pattern in patterns:
            p = str(pattern).strip().lower()
            if p and p not in seen:
                seen.append(p)
        return cls(patterns=tuple(seen))

    @classmethod
    def from_text(cls, text: str) -> "Watchlist":
        return cls.of(line.split("#", 1)[0] for line in text.splitlines())


def detect_suspicious(processes, watchlist: Watchlist) -> tuple[str, ...]:
    """Process names matching any watchlist pattern; deduplicated, sorted."""
    matched = set()
    for proc in processes:
        name = proc.name if isinstance(proc, ProcessInfo) else str(proc)
        lowered = name.lower()
        if any(fnmatch.fnmatchcase(lowered, pattern) for pattern in watchlist.patterns):
            matched.add(name)
    return tuple(sorted(matched))


@dataclass(frozen=True)
class StalenessWindows:
    stale_after: float = DEFAULT_HEARTBEAT_PERIOD * STALE_MULTIPLIER
    offline_after: float = DEFAULT_HEARTBEAT_PERIOD * OFFLINE_MULTIPLIER

    @classmethod
    def for_heartbeat_period(cls, period: float) -> "StalenessWindows":
        return cls(stale_after=period * STALE_MULTIPLIER, offline_after=period * OFFLINE_MULTIPLIER)


@dataclass(frozen=True)
class FleetRow:
    machine: MachineRecord
    latest: StatusEntry | None
    liveness: Liveness
    suspicious: tuple[str, ...] = ()
    booted_at: float | None = None

    @property
    def badge(self) -> str:
        return "QUARANTINED" if self.machine.quarantined else self.liveness.value


@dataclass(frozen=True)
class FleetView:
    rows: tuple[FleetRow, ...]
    generated_at: float

    def row(self, agent: AgentId) -> FleetRow | None:
        for row in self.rows:
            if row.machine.agent == agent:
                return row
        return None

    def flagged(self) -> list[FleetRow]:
        return [row for row in self.rows if row.suspicious]


def _liveness(latest: StatusEntry | None, now: float, windows: StalenessWindows) -> Liveness:
    if latest is None:
        return Liveness.OFFLINE
    age = now - latest.timestamp
    if age < windows.stale_after:
        return Liveness.ACTIVE
    if age < windows.offline_after:
        return Liveness.STALE
    return Liveness.OFFLINE


def build_fleet_view(
    machines: list[MachineRecord],
    latest: dict[AgentId, StatusEntry],
    watchlist: Watchlist,
    now: float,
    windows: StalenessWindows = StalenessWindows(),
    boot_times: dict[AgentId, float] | None = None,
) -> FleetView:
    """Pure join of registry x latest heartbeats: same inputs, same view."""
    boot_times = boot_times or {}
    rows = []
    for machine in sorted(machines, key=lambda m: m.agent):
        entry = latest.get(machine.agent)
        rows.append(
            FleetRow(
                machine=machine,
                latest=entry,
                liveness=_liveness(entry, now, windows),
                suspicious=detect_suspicious(entry.processes, watchlist) if entry else (),
                booted_at=boot_times.get(machine.agent),
            )
        )
    return FleetView(rows=tuple(rows), generated_at=now)


def confirm_acknowledgement(
    view_before: FleetView,
    view_after: FleetView,
    agent: AgentId,
    command: CommandEntry,
) -> AckStatus:
    """Did the fleet view confirm the executed command?

    A shutdown (or hibernate) is acknowledged by absence: the machine's row
    leaves ACTIVE in the updated view. A restart is acknowledged by a fresh
    boot signature: a seq-0 heartbeat newer than the command. A logoff has
    no liveness signature; its executed transition is the acknowledgement.
    """
    if command.state is not CommandState.EXECUTED:
        return AckStatus.AWAITING
    row = view_after.row(agent)
    if row is None:
        return AckStatus.AWAITING
    if command.kind in (CommandKind.SHUTDOWN, CommandKind.HIBERNATE):
        if row.liveness is not Liveness.ACTIVE:
            return AckStatus.ACKNOWLEDGED
        return AckStatus.AWAITING
    if command.kind is CommandKind.RESTART:
        if row.latest is not None and row.latest.seq == 0 and row.latest.timestamp > command.issued_at:
            return AckStatus.ACKNOWLEDGED
        return AckStatus.AWAITING
    return AckStatus.ACKNOWLEDGED
