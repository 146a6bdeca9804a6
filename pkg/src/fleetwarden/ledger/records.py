"""Typed records carried by the shared ledger.

Two record classes travel between agents and the controller: StatusEntry
(an agent's periodic heartbeat) and CommandEntry (an addressed remote
action with a PENDING -> EXECUTED | FAILED | EXPIRED lifecycle). Records
are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

AgentId = str

MAX_AGENT_ID_LEN = 128
MAX_PROCESS_LIST = 256

_CONTROL_CHARS = re.compile(r"[\x00-\x1f\x7f]")


class RecordValidationError(ValueError):
    """A record field violates its invariant; `field_name` says which."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"invariant violation: {field_name}: {message}")
        self.field_name = field_name


def validate_agent_id(value: str) -> str:
    if not isinstance(value, str) or not value:
        raise RecordValidationError("agent", "must be a non-empty string")
    if len(value) > MAX_AGENT_ID_LEN:
        raise RecordValidationError("agent", f"longer than {MAX_AGENT_ID_LEN} chars")
    if "/" in value or "\\" in value:
        raise RecordValidationError("agent", "path separators not allowed")
    if _CONTROL_CHARS.search(value):
        raise RecordValidationError("agent", "control characters not allowed")
    return value


class Status(str, Enum):
    BUSY = "BUSY"
    IDLE = "IDLE"


class CommandKind(str, Enum):
    SHUTDOWN = "SHUTDOWN"
    RESTART = "RESTART"
    LOGOFF = "LOGOFF"
    HIBERNATE = "HIBERNATE"


class CommandState(str, Enum):
    PENDING = "PENDING"
    EXECUTED = "EXECUTED"
    FAILED = "FAILED"
    EXPIRED = "EXPIRED"


TERMINAL_STATES = frozenset({CommandState.EXECUTED, CommandState.FAILED, CommandState.EXPIRED})


@dataclass(frozen=True)
class ProcessInfo:
    name: str
    pid: int
    memory_kb: int = 0

    def validate(self) -> "ProcessInfo":
        if not self.name:
            raise RecordValidationError("processes.name", "must be non-empty")
        if self.pid <= 0:
            raise RecordValidationError("processes.pid", "must be positive")
        if self.memory_kb < 0:
            raise RecordValidationError("processes.memory_kb", "must be non-negative")
        return self


@dataclass(frozen=True)
class TrafficCounters:
    rx_bytes: int = 0
    tx_bytes: int = 0
    rx_packets: int = 0
    tx_packets: int = 0

    def validate(self) -> "TrafficCounters":
        for name in ("rx_bytes", "tx_bytes", "rx_packets", "tx_packets"):
            if getattr(self, name) < 0:
                raise RecordValidationError(f"traffic.{name}", "must be non-negative")
        return self


@dataclass(frozen=True)
class StatusEntry:
    """One heartbeat: who, when, BUSY/IDLE, how long idle, what's running.

    `seq` starts at 0 on agent start and increases by 1 per heartbeat; a
    fresh seq-0 entry is the restart signature the controller looks for.
    `degraded` flags a tick where an input/process/traffic source failed;
    `traffic_reset` flags a tick where counters went backwards (source
    restarted) and the raw new values are reported.
    """

    agent: AgentId
    seq: int
    timestamp: float
    status: Status
    idle_seconds: int
    processes: tuple[ProcessInfo, ...] = ()
    traffic: TrafficCounters = field(default_factory=TrafficCounters)
    degraded: bool = False
    traffic_reset: bool = False

    def validate(self) -> "StatusEntry":
        validate_agent_id(self.agent)
        if self.seq < 0:
            raise RecordValidationError("seq", "must be non-negative")
        if self.idle_seconds < 0:
            raise RecordValidationError("idle_seconds", "must be non-negative")
        if not isinstance(self.status, Status):
            raise RecordValidationError("status", "must be BUSY or IDLE")
        if len(self.processes) > MAX_PROCESS_LIST:
            raise RecordValidationError("processes", f"more than {MAX_PROCESS_LIST} entries")
        for proc in self.processes:
            proc.validate()
        self.traffic.validate()
        return self


@dataclass(frozen=True)
class CommandEntry:
    """An addressed remote action.

    The ledger is append-only: a state transition is recorded by appending
    a fresh copy of the command with the new state, and the current state
    of a command is the state of its last record.
    """

    command_id: str
    target: AgentId
    kind: CommandKind
    issued_at: float
    expires_at: float
    state: CommandState = CommandState.PENDING
    result_note: str | None = None

    def validate(self) -> "CommandEntry":
        if not self.command_id:
            raise RecordValidationError("command_id", "must be non-empty")
        validate_agent_id(self.target)
        if not isinstance(self.kind, CommandKind):
            raise RecordValidationError("kind", "unknown command kind")
        if not isinstance(self.state, CommandState):
            raise RecordValidationError("state", "unknown command state")
        if self.expires_at <= self.issued_at:
            raise RecordValidationError("expires_at", "must be after issued_at")
        return self

    def with_state(self, state: CommandState, result_note: str | None = None) -> "CommandEntry":
        return replace(self, state=state, result_note=result_note)


Record = StatusEntry | CommandEntry
