"""Append-only fleet history events and the replayable state fold.

Everything the controller learns or decides becomes a FleetEvent; replaying
the event log (a left fold of `apply_event` over events in id order)
reconstructs controller boot state: the machine registry, quarantine flags,
and the set of commands still open.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any


class EventKind(str, Enum):
    REGISTERED = "REGISTERED"
    HEARTBEAT_SUMMARY = "HEARTBEAT_SUMMARY"
    COMMAND_ISSUED = "COMMAND_ISSUED"
    COMMAND_TRANSITIONED = "COMMAND_TRANSITIONED"
    QUARANTINE_CHANGED = "QUARANTINE_CHANGED"
    SUSPICIOUS_FLAGGED = "SUSPICIOUS_FLAGGED"
    SCAN_COMPLETED = "SCAN_COMPLETED"


@dataclass(frozen=True)
class FleetEvent:
    event_id: int
    at: float
    kind: EventKind
    agent: str | None = None
    payload: dict[str, Any] = field(default_factory=dict)

    def with_id(self, event_id: int) -> "FleetEvent":
        return replace(self, event_id=event_id)


@dataclass
class Snapshot:
    """Replayed state: machine rows and still-open commands, payload-shaped."""

    machines: dict[str, dict[str, Any]] = field(default_factory=dict)
    open_commands: dict[str, dict[str, Any]] = field(default_factory=dict)

    def copy(self) -> "Snapshot":
        return Snapshot(
            machines=copy.deepcopy(self.machines),
            open_commands=copy.deepcopy(self.open_commands),
        )


def apply_event(snapshot: Snapshot, event: FleetEvent) -> Snapshot:
    """Pure transition: the snapshot after `event`. Input is not mutated."""
    out = snapshot.copy()
    kind, payload = event.kind, event.payload
    if kind is EventKind.REGISTERED and event.agent:
        row = dict(payload)
        row.setdefault("quarantined", False)
        row.setdefault("registered_at", event.at)
        out.machines[event.agent] = row
    elif kind is EventKind.QUARANTINE_CHANGED and event.agent:
        if event.agent in out.machines:
            out.machines[event.agent]["quarantined"] = bool(payload.get("on", False))
    elif kind is EventKind.COMMAND_ISSUED:
        cid = payload.get("command_id")
        if cid:
            out.open_commands[str(cid)] = dict(payload)
    elif kind is EventKind.COMMAND_TRANSITIONED:
        cid = payload.get("command_id")
        if cid:
            out.open_commands.pop(str(cid), None)
    elif kind is EventKind.HEARTBEAT_SUMMARY and event.agent:
        if event.agent in out.machines:
            out.machines[event.agent]["last_seen"] = payload.get("period_end", event.at)
    # SUSPICIOUS_FLAGGED and SCAN_COMPLETED are history only.
    return out
