"""The controller: server-side brain of the fleet.

Boots its registry by replaying the event store, then runs a refresh loop:
pull new ledger records through a cursor, track boot times and last-seen,
downsample heartbeats into summary events, record command transitions,
expire overdue commands, flag watchlist hits, and let the policy engine
issue automated actions. Admin operations (register, quarantine, issue,
scan) are available concurrently; anything that mutates shared state takes
the controller lock, so policy evaluation and action issuance for the same
agent never race.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Callable

from ..clock import Clock, SystemClock
from ..energy.accounting import (
    EnergyBreakdown,
    SavingsReport,
    StateInterval,
    always_on_baseline,
    derive_state_intervals,
    energy_wh,
    savings_report,
)
from ..energy.model import DisplayClass, PowerModel
from ..ledger.base import Ledger
from ..ledger.records import AgentId, CommandEntry, CommandKind, CommandState, StatusEntry
from ..persistence.events import EventKind, FleetEvent
from ..persistence.store import EventStore, replay
from ..persistence.summarize import HeartbeatSummarizer
from ..policy.engine import PolicyConfig, evaluate
from .fleetview import (
    AckStatus,
    FleetView,
    StalenessWindows,
    Watchlist,
    build_fleet_view,
    confirm_acknowledgement,
)
from .registry import MachineRecord, Registry, UnknownAgentError
from .scan import Prober, scan_network

DEFAULT_COMMAND_EXPIRY = 300.0


def _uuid_factory() -> str:
    return uuid.uuid4().hex


@dataclass
class RefreshReport:
    heartbeats: int = 0
    transitions: int = 0
    expired: int = 0
    policy_issued: list[tuple[AgentId, CommandKind]] = field(default_factory=list)
    flagged: list[AgentId] = field(default_factory=list)


class Controller:
    def __init__(
        self,
        ledger: Ledger,
        store: EventStore,
        clock: Clock | None = None,
        policy: PolicyConfig | None = None,
        watchlist: Watchlist | None = None,
        windows: StalenessWindows | None = None,
        prober: Prober | None = None,
        command_expiry: float = DEFAULT_COMMAND_EXPIRY,
        summary_period: float | None = None,
        id_factory: Callable[[], str] | None = None,
    ):
        self.ledger = ledger
        self.store = store
        self.clock = clock or SystemClock()
        self.policy = policy
        self.watchlist = watchlist or Watchlist()
        self.windows = windows or StalenessWindows()
        self.prober = prober
        self.command_expiry = command_expiry
        self.registry = Registry()
        self._id_factory = id_factory or _uuid_factory
        self._summarizer = HeartbeatSummarizer(summary_period) if summary_period else HeartbeatSummarizer()
        self._cursor = None
        self._boot_times: dict[AgentId, float] = {}
        self._flagged: dict[AgentId, tuple[str, ...]] = {}
        self._terminal_recorded: set[str] = set()
        self._lock = threading.RLock()
        self._boot_from_store()

    # -- boot

    def _boot_from_store(self) -> None:
        snapshot = replay(self.store)
        for agent, row in snapshot.machines.items():
            try:
                record = self.registry.register(
                    agent=agent,
                    address=row.get("address", "0.0.0.0"),
                    display_class=row.get("display_class", DisplayClass.OTHER.value),
                    now=float(row.get("registered_at", 0.0)),
                )
            except Exception:
                continue  # a malformed historical row must not block boot
            record.quarantined = bool(row.get("quarantined", False))
            if row.get("last_seen") is not None:
                record.last_seen = float(row["last_seen"])
        for event in self.store.events():
            if event.kind is EventKind.COMMAND_TRANSITIONED:
                cid = event.payload.get("command_id")
                if cid:
                    self._terminal_recorded.add(str(cid))

    # -- admin operations

    def register_machine(
        self, agent: AgentId, address: str, display_class: DisplayClass | str
    ) -> MachineRecord:
        with self._lock:
            now = self.clock.now()
            record = self.registry.register(agent, address, display_class, now)
            self.store.record(
                EventKind.REGISTERED,
                at=now,
                agent=agent,
                payload={
                    "agent": agent,
                    "address": address,
                    "display_class": record.display_class.value,
                    "registered_at": now,
                },
            )
            return record

    def quarantine(self, agent: AgentId, on: bool) -> MachineRecord:
        with self._lock:
            record = self.registry.set_quarantine(agent, on)
            self.store.record(
                EventKind.QUARANTINE_CHANGED,
                at=self.clock.now(),
                agent=agent,
                payload={"on": bool(on)},
            )
            return record

    def issue_action(
        self, agent: AgentId, kind: CommandKind, expiry: float | None = None
    ) -> CommandEntry:
        """Append a PENDING command for a registered machine (admin or policy)."""
        with self._lock:
            if not self.registry.contains(agent):
                raise UnknownAgentError(f"unknown agent {agent!r}")
            now = self.clock.now()
            command = CommandEntry(
                command_id=self._id_factory(),
                target=agent,
                kind=kind,
                issued_at=now,
                expires_at=now + (expiry if expiry is not None else self.command_expiry),
            )
            self.ledger.append(command)
            self.store.record(
                EventKind.COMMAND_ISSUED,
                at=now,
                agent=agent,
                payload={
                    "command_id": command.command_id,
                    "kind": kind.value,
                    "target": agent,
                    "expires_at": command.expires_at,
                },
            )
            return command

    def scan(self, address_range: str) -> list[str]:
        if self.prober is None:
            raise RuntimeError("no prober configured")
        alive = scan_network(address_range, self.prober)
        self.store.record(
            EventKind.SCAN_COMPLETED,
            at=self.clock.now(),
            payload={"range": address_range, "alive": alive},
        )
        return alive

    def command(self, command_id: str) -> CommandEntry | None:
        return self.ledger.current_commands().get(command_id)

    # -- read side

    def fleet_view(self, now: float | None = None) -> FleetView:
        return build_fleet_view(
            machines=self.registry.rows(),
            latest=self.ledger.read_latest_per_agent(),
            watchlist=self.watchlist,
            now=now if now is not None else self.clock.now(),
            windows=self.windows,
            boot_times=dict(self._boot_times),
        )

    def machine_detail(self, agent: AgentId) -> dict:
        record = self.registry.get(agent)
        latest = self.ledger.read_latest_per_agent().get(agent)
        commands = [
            c for c in self.ledger.read_commands() if c.target == agent
        ]
        view = self.fleet_view()
        row = view.row(agent)
        return {
            "machine": record,
            "latest": latest,
            "liveness": row.liveness if row else None,
            "suspicious": row.suspicious if row else (),
            "commands": commands,
        }

    def confirm(
        self, view_before: FleetView, view_after: FleetView, agent: AgentId, command_id: str
    ) -> AckStatus:
        command = self.command(command_id)
        if command is None:
            return AckStatus.AWAITING
        return confirm_acknowledgement(view_before, view_after, agent, command)

    def history(
        self,
        agent: AgentId | None = None,
        kind: EventKind | None = None,
        since: float | None = None,
        until: float | None = None,
    ) -> list[FleetEvent]:
        return self.store.query(agent=agent, kind=kind, since=since, until=until)

    # -- refresh loop body

    def refresh(self) -> RefreshReport:
        """One pass: ingest new ledger records, expire, evaluate policy."""
        with self._lock:
            report = RefreshReport()
            now = self.clock.now()
            records, self._cursor = self.ledger.read_new(self._cursor)
            for record in records:
                if isinstance(record, StatusEntry):
                    self._ingest_heartbeat(record, report)
                elif isinstance(record, CommandEntry) and record.state is not CommandState.PENDING:
                    self._record_transition(record, now, report)
            for expired in self.ledger.expire_overdue(now):
                report.expired += 1
                self._record_transition(expired, now, report)
            self._run_policy(now, report)
            return report

    def _ingest_heartbeat(self, entry: StatusEntry, report: RefreshReport) -> None:
        report.heartbeats += 1
        self.registry.touch(entry.agent, entry.timestamp)
        if entry.seq == 0:
            self._boot_times[entry.agent] = entry.timestamp
        for draft in self._summarizer.observe(entry):
            self.store.record(
                EventKind.HEARTBEAT_SUMMARY, at=draft.at, agent=draft.agent, payload=draft.payload
            )
        from .fleetview import detect_suspicious

        matches = detect_suspicious(entry.processes, self.watchlist)
        if matches and matches != self._flagged.get(entry.agent):
            self.store.record(
                EventKind.SUSPICIOUS_FLAGGED,
                at=entry.timestamp,
                agent=entry.agent,
                payload={"matches": list(matches)},
            )
            report.flagged.append(entry.agent)
        self._flagged[entry.agent] = matches

    def _record_transition(self, command: CommandEntry, at: float, report: RefreshReport) -> None:
        if command.command_id in self._terminal_recorded:
            return
        self._terminal_recorded.add(command.command_id)
        report.transitions += 1
        self.store.record(
            EventKind.COMMAND_TRANSITIONED,
            at=at,
            agent=command.target,
            payload={
                "command_id": command.command_id,
                "state": command.state.value,
                "kind": command.kind.value,
                "target": command.target,
                "result_note": command.result_note,
            },
        )

    def _run_policy(self, now: float, report: RefreshReport) -> None:
        if self.policy is None or not self.policy.enabled:
            return
        view = self.fleet_view(now)
        commands = list(self.ledger.current_commands().values())
        for agent, kind in evaluate(view, self.policy, commands, now):
            self.issue_action(agent, kind)
            report.policy_issued.append((agent, kind))

    # -- energy reporting

    def _models(self) -> dict[AgentId, PowerModel]:
        return {row.agent: row.power_model for row in self.registry.rows()}

    def state_intervals(
        self, since: float | None = None, until: float | None = None
    ) -> list[StateInterval]:
        models = self._models()
        entries = [e for e in self.ledger.read_status_history() if e.agent in models]
        executed: list[tuple[CommandEntry, float]] = []
        commands_by_id = {}
        for command in self.ledger.read_commands():
            commands_by_id[command.command_id] = command
        for event in self.store.query(kind=EventKind.COMMAND_TRANSITIONED):
            if event.payload.get("state") != CommandState.EXECUTED.value:
                continue
            command = commands_by_id.get(str(event.payload.get("command_id")))
            if command is not None:
                executed.append((command, event.at))
        return derive_state_intervals(entries, executed, since=since, until=until)

    def energy_report(
        self,
        since: float | None = None,
        until: float | None = None,
        baseline: str | None = None,
    ) -> tuple[EnergyBreakdown, SavingsReport | None]:
        actual = self.state_intervals(since, until)
        breakdown = energy_wh(actual, self._models())
        savings = None
        if baseline == "always-on":
            savings = savings_report(always_on_baseline(actual), actual, self._models())
        return breakdown, savings
