"""Ledger interface and the append/read/transition semantics.

A ledger is the shared append-only channel between agents and the
controller. Agents append their own StatusEntries and transition commands
addressed to them; the controller appends new CommandEntries. Two
transports exist: a shared-directory ledger (`FileLedger`) and an HTTP
ledger hosted by the controller (`HttpLedger`); both expose the interface
defined here. `MemoryLedger` backs tests and the simulation harness.

Command lifecycle is event-sourced: a transition appends a fresh copy of
the command with the new state, and the current state of a command is its
last record. Nothing is ever rewritten.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable

from .codec import CodecError
from .records import (
    AgentId,
    CommandEntry,
    CommandState,
    Record,
    RecordValidationError,
    StatusEntry,
    TERMINAL_STATES,
)

DECODE_ERRORS = (CodecError, RecordValidationError)

EXPIRED_NOTE = "expired unexecuted"


class LedgerError(Exception):
    pass


class LedgerUnavailableError(LedgerError):
    """Transport failure; the caller should retry with backoff."""


class LedgerAuthorizationError(LedgerError):
    pass


class UnknownCommandError(LedgerError):
    pass


class LifecycleError(LedgerError):
    """Illegal command state transition."""

    def __init__(self, message: str = "lifecycle violation"):
        super().__init__(message)


@dataclass
class LedgerCursor:
    """Opaque per-reader resumption token; each record is seen at most once."""

    position: dict[str, Any] = field(default_factory=dict)


class Ledger(ABC):
    @abstractmethod
    def append(self, record: Record) -> int:
        """Durably append one record, returning its position."""

    @abstractmethod
    def read_latest_per_agent(self) -> dict[AgentId, StatusEntry]:
        """Most recently appended StatusEntry per agent; malformed lines skipped."""

    @abstractmethod
    def read_status_history(self, agent: AgentId | None = None) -> list[StatusEntry]:
        """All StatusEntries (for one agent, in append order; across agents, by timestamp)."""

    @abstractmethod
    def read_pending_commands(self, target: AgentId, now: float) -> list[CommandEntry]:
        """PENDING, unexpired commands for `target`, ordered by issued_at.

        Overdue PENDING commands for the target are transitioned to EXPIRED
        as a side effect instead of being returned.
        """

    @abstractmethod
    def read_commands(self) -> list[CommandEntry]:
        """Full command record history in append order (transitions included)."""

    @abstractmethod
    def transition_command(
        self, command_id: str, new_state: CommandState, result_note: str | None = None
    ) -> CommandEntry:
        """Append a state transition for a PENDING command; terminal states are immutable."""

    @abstractmethod
    def read_new(self, cursor: LedgerCursor | None = None) -> tuple[list[Record], LedgerCursor]:
        """Records appended since `cursor` (None = from the start), and the advanced cursor."""

    @property
    @abstractmethod
    def malformed_count(self) -> int:
        """Cumulative count of skipped undecodable lines."""

    # Derived helpers shared by all transports.

    def current_commands(self) -> dict[str, CommandEntry]:
        """Latest record per command_id, i.e. each command's current state."""
        current: dict[str, CommandEntry] = {}
        for entry in self.read_commands():
            current[entry.command_id] = entry
        return current

    def expire_overdue(self, now: float) -> list[CommandEntry]:
        """Transition every overdue PENDING command (any target) to EXPIRED."""
        expired = []
        for entry in self.current_commands().values():
            if entry.state is CommandState.PENDING and entry.expires_at <= now:
                expired.append(
                    self.transition_command(entry.command_id, CommandState.EXPIRED, EXPIRED_NOTE)
                )
        return expired


class LocalLedger(Ledger):
    """Shared semantics for ledgers that hold their records locally.

    Subclasses provide raw storage via `_append_record` / `_iter_*`; the
    fold logic (latest per agent, pending set, lifecycle enforcement) and
    writer authorization live here. `author` names the agent this handle
    writes for; None means an unrestricted (controller/test) handle.
    """

    def __init__(self, author: AgentId | None = None):
        self._author = author
        self._transition_lock = threading.Lock()

    @abstractmethod
    def _append_record(self, record: Record) -> int: ...

    @abstractmethod
    def _iter_status(self, agent: AgentId | None = None) -> Iterable[StatusEntry]: ...

    @abstractmethod
    def _iter_commands(self) -> Iterable[CommandEntry]: ...

    def _authorize(self, record: Record) -> None:
        if self._author is None:
            return
        if isinstance(record, StatusEntry):
            if record.agent != self._author:
                raise LedgerAuthorizationError(
                    f"agent {self._author!r} may not report status for {record.agent!r}"
                )
        else:
            # Agents never issue commands; they may only append transitions
            # of commands addressed to them.
            if record.state not in TERMINAL_STATES or record.target != self._author:
                raise LedgerAuthorizationError(
                    f"agent {self._author!r} may not append command {record.command_id!r}"
                )

    def append(self, record: Record) -> int:
        record.validate()
        self._authorize(record)
        return self._append_record(record)

    def read_latest_per_agent(self) -> dict[AgentId, StatusEntry]:
        latest: dict[AgentId, StatusEntry] = {}
        for entry in self._iter_status():
            latest[entry.agent] = entry
        return latest

    def read_status_history(self, agent: AgentId | None = None) -> list[StatusEntry]:
        entries = list(self._iter_status(agent))
        if agent is None:
            entries.sort(key=lambda e: (e.timestamp, e.agent, e.seq))
        return entries

    def read_commands(self) -> list[CommandEntry]:
        return list(self._iter_commands())

    def read_pending_commands(self, target: AgentId, now: float) -> list[CommandEntry]:
        pending = []
        for entry in self.current_commands().values():
            if entry.target != target or entry.state is not CommandState.PENDING:
                continue
            if entry.expires_at <= now:
                self.transition_command(entry.command_id, CommandState.EXPIRED, EXPIRED_NOTE)
            else:
                pending.append(entry)
        pending.sort(key=lambda e: (e.issued_at, e.command_id))
        return pending

    def transition_command(
        self, command_id: str, new_state: CommandState, result_note: str | None = None
    ) -> CommandEntry:
        if new_state not in TERMINAL_STATES:
            raise LifecycleError("lifecycle violation: transition must reach a terminal state")
        with self._transition_lock:
            current = self.current_commands().get(command_id)
            if current is None:
                raise UnknownCommandError(f"unknown command_id: {command_id!r}")
            if current.state is not CommandState.PENDING:
                raise LifecycleError(
                    f"lifecycle violation: {command_id!r} already {current.state.value}"
                )
            updated = current.with_state(new_state, result_note)
            self._authorize(updated)
            self._append_record(updated)
            return updated
