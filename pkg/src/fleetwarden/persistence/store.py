"""Event store backends.

The default is a single append-only log file, one JSON event per line,
same line-record discipline as the ledger. A torn final line (interrupted
last write) is dropped on open; corruption anywhere else refuses to open
with a recovery hint, because a hole in the middle of history cannot be
reconciled automatically.
"""

from __future__ import annotations

import json
import os
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

from .events import EventKind, FleetEvent, Snapshot, apply_event

EVENT_TAG = "event"
SCHEMA_VERSION = 1


class StoreError(Exception):
    pass


class StoreCorruptionError(StoreError):
    pass


class EventStore(ABC):
    @abstractmethod
    def append(self, event: FleetEvent) -> int:
        """Durably append; the store assigns and returns the event_id."""

    @abstractmethod
    def events(self, upto: int | None = None) -> list[FleetEvent]: ...

    def record(self, kind: EventKind, at: float, agent: str | None = None,
               payload: dict[str, Any] | None = None) -> FleetEvent:
        event = FleetEvent(event_id=0, at=at, kind=kind, agent=agent, payload=payload or {})
        event_id = self.append(event)
        return event.with_id(event_id)

    def query(
        self,
        agent: str | None = None,
        kind: EventKind | None = None,
        since: float | None = None,
        until: float | None = None,
    ) -> list[FleetEvent]:
        """Events matching every given predicate, in event_id order."""
        if since is not None and until is not None and since > until:
            raise StoreError("inverted range: since > until")
        out = []
        for event in self.events():
            if agent is not None and event.agent != agent:
                continue
            if kind is not None and event.kind is not kind:
                continue
            if since is not None and event.at < since:
                continue
            if until is not None and event.at > until:
                continue
            out.append(event)
        return out


def replay(store: EventStore, upto: int | None = None) -> Snapshot:
    """Left-fold of apply_event over the stored history."""
    snapshot = Snapshot()
    for event in store.events(upto):
        snapshot = apply_event(snapshot, event)
    return snapshot


class MemoryEventStore(EventStore):
    def __init__(self):
        self._events: list[FleetEvent] = []
        self._lock = threading.Lock()

    def append(self, event: FleetEvent) -> int:
        with self._lock:
            event_id = len(self._events) + 1
            self._events.append(event.with_id(event_id))
            return event_id

    def events(self, upto: int | None = None) -> list[FleetEvent]:
        with self._lock:
            if upto is None:
                return list(self._events)
            return [e for e in self._events if e.event_id <= upto]


def _encode_event(event: FleetEvent) -> str:
    doc = {
        "type": EVENT_TAG,
        "v": SCHEMA_VERSION,
        "id": event.event_id,
        "at": event.at,
        "kind": event.kind.value,
        "agent": event.agent,
        "payload": event.payload,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _decode_event(line: str) -> FleetEvent:
    doc = json.loads(line)
    if not isinstance(doc, dict) or doc.get("type") != EVENT_TAG or doc.get("v") != SCHEMA_VERSION:
        raise ValueError("not an event record")
    return FleetEvent(
        event_id=int(doc["id"]),
        at=float(doc["at"]),
        kind=EventKind(doc["kind"]),
        agent=doc.get("agent"),
        payload=dict(doc.get("payload") or {}),
    )


class FileEventStore(EventStore):
    def __init__(self, path: str | os.PathLike, durable: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._durable = durable
        self._lock = threading.Lock()
        self._events: list[FleetEvent] = []
        self.dropped_tail = 0
        self._load()

    def _load(self) -> None:
        try:
            raw = self.path.read_bytes()
        except FileNotFoundError:
            return
        except OSError as exc:
            raise StoreError(f"cannot read event log {self.path}: {exc}") from exc
        lines = raw.split(b"\n")
        torn = lines.pop() if lines and lines[-1] != b"" else None
        if lines and lines[-1] == b"":
            lines.pop()
        if torn:
            self.dropped_tail += 1
        last_id = 0
        for index, line in enumerate(lines):
            try:
                event = _decode_event(line.decode("utf-8"))
            except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
                if index == len(lines) - 1:
                    self.dropped_tail += 1  # interrupted final write
                    break
                raise StoreCorruptionError(
                    f"{self.path} line {index + 1} is corrupt ({exc}); "
                    f"truncate the file to the last good line or restore from backup"
                ) from exc
            if event.event_id <= last_id:
                raise StoreCorruptionError(
                    f"{self.path} line {index + 1}: event_id {event.event_id} not increasing; "
                    f"the log appears spliced, restore from backup"
                )
            last_id = event.event_id
            self._events.append(event)

    def append(self, event: FleetEvent) -> int:
        with self._lock:
            event_id = (self._events[-1].event_id + 1) if self._events else 1
            assigned = event.with_id(event_id)
            line = _encode_event(assigned)
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.flush()
                    if self._durable:
                        os.fsync(fh.fileno())
            except OSError as exc:
                raise StoreError(f"append to {self.path} failed: {exc}") from exc
            self._events.append(assigned)
            return event_id

    def events(self, upto: int | None = None) -> list[FleetEvent]:
        with self._lock:
            if upto is None:
                return list(self._events)
            return [e for e in self._events if e.event_id <= upto]
