"""The per-machine agent.

Two periodic duties share one process: the heartbeat tick composes an
activity/process/traffic observation into a StatusEntry and appends it to
the ledger, and the poll tick fetches commands addressed to this machine
and executes them through the platform backend with the dedupe journal
guaranteeing at-most-once invocation.

Tick methods are synchronous and clock-driven so the simulation harness
can schedule them deterministically; `run()` wraps them in threads against
the wall clock for real deployments.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable

from ..clock import Clock
from ..ledger.base import Ledger, LedgerError, LedgerUnavailableError
from ..ledger.records import CommandEntry, CommandKind, CommandState, StatusEntry, TrafficCounters
from .config import AgentConfig
from .journal import DedupeJournal, JournalError
from .platform_actions import ActionOutcome, PlatformAction
from .sampling import determine_status, sample_activity, sample_processes, sample_traffic
from .sources import InputSource, ProcessSource, TrafficSource

HEARTBEAT_BUFFER_LIMIT = 100
JOURNAL_PRUNE_HORIZON = 3600.0

CRASH_NOTE = "crash during execution; outcome unknown"

# Fault hook signature: (point, command_id); may raise SimulatedCrash.
FaultHook = Callable[[str, str], None]


class SimulatedCrash(Exception):
    """Raised by a fault hook to kill the agent at a chosen point."""


@dataclass
class AgentSources:
    input: InputSource
    processes: ProcessSource
    traffic: TrafficSource


class Agent:
    def __init__(
        self,
        config: AgentConfig,
        ledger: Ledger,
        clock: Clock,
        sources: AgentSources,
        platform: PlatformAction,
        journal: DedupeJournal | None = None,
        faults: FaultHook | None = None,
    ):
        self.config = config
        self.ledger = ledger
        self.clock = clock
        self.sources = sources
        self.platform = platform
        self.journal = journal or DedupeJournal()
        self.faults = faults
        self._seq = 0
        self._prev_traffic: TrafficCounters | None = None
        self._buffer: list[StatusEntry] = []
        self._powered_on = True
        self._lock = threading.Lock()

    @property
    def agent_id(self) -> str:
        return self.config.agent_id

    @property
    def powered_on(self) -> bool:
        return self._powered_on

    # -- lifecycle transitions of the machine itself

    def _halt(self) -> None:
        self._powered_on = False

    def power_on(self) -> None:
        """Machine switched back on: fresh boot, seq restarts at 0."""
        self._powered_on = True
        self._seq = 0
        self._buffer.clear()
        self._prev_traffic = None

    def _reboot(self) -> None:
        self._powered_on = True
        self._seq = 0
        self._buffer.clear()
        self._prev_traffic = None

    def wake(self) -> None:
        """Resume from hibernation; the process survived, seq continues."""
        self._powered_on = True

    # -- heartbeat duty

    def heartbeat_tick(self) -> StatusEntry | None:
        """Compose and append one StatusEntry; None while powered off."""
        with self._lock:
            if not self._powered_on:
                return None
            now = self.clock.now()
            activity = sample_activity(now, self.sources.input)
            processes, procs_degraded = sample_processes(self.sources.processes)
            traffic = sample_traffic(self.sources.traffic, self._prev_traffic)
            self._prev_traffic = traffic.counters
            entry = StatusEntry(
                agent=self.agent_id,
                seq=self._seq,
                timestamp=now,
                status=determine_status(activity.idle_seconds, self.config.idle_threshold_seconds),
                idle_seconds=activity.idle_seconds,
                processes=processes,
                traffic=traffic.counters,
                degraded=activity.degraded or procs_degraded or traffic.degraded,
                traffic_reset=traffic.reset,
            )
            self._seq += 1
            self._buffer.append(entry)
            if len(self._buffer) > HEARTBEAT_BUFFER_LIMIT:
                del self._buffer[0]
            self._flush_buffer()
            return entry

    def _flush_buffer(self) -> None:
        while self._buffer:
            try:
                self.ledger.append(self._buffer[0])
            except LedgerUnavailableError:
                return  # retry next tick, oldest first, seq order preserved
            del self._buffer[0]

    # -- command duty

    def _fault(self, point: str, command_id: str) -> None:
        if self.faults is not None:
            self.faults(point, command_id)

    def poll_tick(self) -> list[str]:
        """Execute pending commands addressed to this machine; returns executed ids."""
        if not self._powered_on:
            return []
        now = self.clock.now()
        executed: list[str] = []
        self._resolve_journal(now, executed)
        try:
            pending = self.ledger.read_pending_commands(self.agent_id, now)
        except LedgerUnavailableError:
            return executed
        for command in pending:
            if self._execute_command(command, now):
                executed.append(command.command_id)
            if not self._powered_on:
                break  # machine went down; remaining commands wait or expire
        self.journal.prune(before=now - JOURNAL_PRUNE_HORIZON)
        return executed

    def _resolve_journal(self, now: float, executed: list[str]) -> None:
        """Finish commands interrupted by a crash, before they can expire.

        A journal entry stuck at `done` carries a real outcome that never
        reached the ledger; record it. One stuck at `claimed` crashed
        mid-execution with an unknown outcome; fail it, never re-invoke.
        """
        for entry in self.journal.unresolved():
            if entry.phase == "done":
                ok, note = bool(entry.ok), entry.note
            else:
                ok, note = False, CRASH_NOTE
            try:
                state = CommandState.EXECUTED if ok else CommandState.FAILED
                self.ledger.transition_command(entry.command_id, state, note or None)
            except LedgerUnavailableError:
                continue  # retry next poll
            except LedgerError:
                pass  # already terminal elsewhere; nothing more to replay
            else:
                if ok:
                    executed.append(entry.command_id)
                    if entry.kind:
                        self._apply_consequence(CommandKind(entry.kind))
            try:
                self.journal.mark_resolved(entry.command_id, now)
            except JournalError:
                continue

    def _execute_command(self, command: CommandEntry, now: float) -> bool:
        cid = command.command_id
        if self.journal.phase(cid) is not None:
            return False  # already claimed/done/resolved; the sweep owns it
        self._fault("before_claim", cid)
        try:
            self.journal.claim(cid, now, kind=command.kind.value)
        except JournalError:
            return False  # cannot make execution safe; leave PENDING
        self._fault("after_claim", cid)
        try:
            outcome = self.platform.invoke(command.kind)
        except SimulatedCrash:
            raise
        except Exception as exc:
            outcome = ActionOutcome(ok=False, detail=f"platform error: {exc}")
        self._fault("after_invoke", cid)
        try:
            self.journal.mark_done(cid, now, outcome.ok, outcome.detail)
        except JournalError:
            # The action ran but the outcome could not be persisted; report
            # what we know now, a replay will see "claimed" and fail safe.
            self._transition(command, outcome.ok, outcome.detail)
            if outcome.ok:
                self._apply_consequence(command.kind)
            return outcome.ok
        self._fault("after_done", cid)
        if self._transition(command, outcome.ok, outcome.detail):
            try:
                self.journal.mark_resolved(cid, now)
            except JournalError:
                pass  # next sweep re-attempts and settles it
        self._fault("after_transition", cid)
        if outcome.ok:
            self._apply_consequence(command.kind)
        return outcome.ok

    def _transition(self, command: CommandEntry, ok: bool, note: str) -> bool:
        state = CommandState.EXECUTED if ok else CommandState.FAILED
        try:
            self.ledger.transition_command(command.command_id, state, note or None)
            return True
        except LedgerError:
            return False  # journal already holds the outcome; a later poll completes it

    def _apply_consequence(self, kind: CommandKind) -> None:
        if kind is CommandKind.SHUTDOWN:
            self._halt()
        elif kind is CommandKind.HIBERNATE:
            self._halt()
        elif kind is CommandKind.RESTART:
            self._reboot()
        # LOGOFF ends the user session; the machine and agent keep running.

    # -- wall-clock runner

    def run(self, stop: threading.Event | None = None) -> None:
        """Run both duties on wall-clock threads until stopped or powered off."""
        stop = stop or threading.Event()

        def heartbeat_loop():
            while not stop.is_set() and self._powered_on:
                self.heartbeat_tick()
                stop.wait(self.config.heartbeat_period_seconds)

        def poll_loop():
            while not stop.is_set() and self._powered_on:
                self.poll_tick()
                stop.wait(self.config.command_poll_period_seconds)

        threads = [
            threading.Thread(target=heartbeat_loop, name="heartbeat", daemon=True),
            threading.Thread(target=poll_loop, name="command-poll", daemon=True),
        ]
        for t in threads:
            t.start()
        try:
            while any(t.is_alive() for t in threads):
                for t in threads:
                    t.join(timeout=0.5)
                if not self._powered_on:
                    stop.set()
        except KeyboardInterrupt:
            stop.set()
        for t in threads:
            t.join(timeout=5)
