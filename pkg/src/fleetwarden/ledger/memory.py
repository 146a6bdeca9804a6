"""In-process ledger used by tests and the simulation harness."""

from __future__ import annotations

import threading
from typing import Iterable

from .base import LedgerCursor, LocalLedger
from .records import AgentId, CommandEntry, Record, StatusEntry


class MemoryLedger(LocalLedger):
    def __init__(self, author: AgentId | None = None):
        super().__init__(author)
        self._records: list[Record] = []
        self._lock = threading.Lock()

    def for_author(self, author: AgentId) -> "MemoryLedger":
        """An agent-scoped handle over the same record storage."""
        scoped = MemoryLedger(author)
        scoped._records = self._records
        scoped._lock = self._lock
        scoped._transition_lock = self._transition_lock
        return scoped

    def _append_record(self, record: Record) -> int:
        with self._lock:
            self._records.append(record)
            return len(self._records) - 1

    def _snapshot(self) -> list[Record]:
        with self._lock:
            return list(self._records)

    def _iter_status(self, agent: AgentId | None = None) -> Iterable[StatusEntry]:
        for record in self._snapshot():
            if isinstance(record, StatusEntry) and (agent is None or record.agent == agent):
                yield record

    def _iter_commands(self) -> Iterable[CommandEntry]:
        for record in self._snapshot():
            if isinstance(record, CommandEntry):
                yield record

    def read_new(self, cursor: LedgerCursor | None = None) -> tuple[list[Record], LedgerCursor]:
        start = 0 if cursor is None else int(cursor.position.get("pos", 0))
        snapshot = self._snapshot()
        return snapshot[start:], LedgerCursor({"pos": len(snapshot)})

    @property
    def malformed_count(self) -> int:
        return 0
