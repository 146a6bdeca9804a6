"""Execution dedupe journal.

A command must never run twice, even if the agent crashes between reading
it and recording the result. The journal tracks two durable phases per
command_id:

    claimed   written before the platform action is invoked
    done      written after it returns, with the outcome

On replay, a `done` command is finished by recording its saved outcome; a
`claimed`-but-not-`done` command is never re-invoked (the crash landed
mid-execution and the outcome is unknown) and is failed instead. A journal
that cannot be written blocks execution: safety over liveness.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path


class JournalError(Exception):
    pass


@dataclass
class JournalEntry:
    command_id: str
    phase: str  # "claimed" | "done" | "resolved"
    at: float
    kind: str = ""
    ok: bool | None = None
    note: str = ""


class DedupeJournal:
    """In-memory journal; subclass persists. Thread-safe."""

    def __init__(self):
        self._entries: dict[str, JournalEntry] = {}
        self._lock = threading.RLock()

    def phase(self, command_id: str) -> str | None:
        with self._lock:
            entry = self._entries.get(command_id)
            return entry.phase if entry else None

    def outcome(self, command_id: str) -> tuple[bool, str]:
        with self._lock:
            entry = self._entries[command_id]
            if entry.phase != "done":
                raise JournalError(f"{command_id!r} has no recorded outcome")
            return bool(entry.ok), entry.note

    def claim(self, command_id: str, at: float, kind: str = "") -> None:
        entry = JournalEntry(command_id, "claimed", at, kind=kind)
        with self._lock:
            self._persist(entry)
            self._entries[command_id] = entry

    def mark_done(self, command_id: str, at: float, ok: bool, note: str = "") -> None:
        with self._lock:
            kind = self._entries[command_id].kind if command_id in self._entries else ""
            entry = JournalEntry(command_id, "done", at, kind=kind, ok=ok, note=note)
            self._persist(entry)
            self._entries[command_id] = entry

    def mark_resolved(self, command_id: str, at: float) -> None:
        """The command's outcome reached the ledger; nothing left to replay."""
        with self._lock:
            prior = self._entries.get(command_id)
            entry = JournalEntry(
                command_id, "resolved", at,
                kind=prior.kind if prior else "",
                ok=prior.ok if prior else None,
                note=prior.note if prior else "",
            )
            self._persist(entry)
            self._entries[command_id] = entry

    def unresolved(self) -> list[JournalEntry]:
        """Entries whose outcome may not have reached the ledger yet."""
        with self._lock:
            return [e for e in self._entries.values() if e.phase in ("claimed", "done")]

    def prune(self, before: float) -> int:
        """Drop entries recorded before the expiry horizon."""
        with self._lock:
            stale = [cid for cid, e in self._entries.items() if e.at < before]
            for cid in stale:
                del self._entries[cid]
            if stale:
                self._rewrite()
            return len(stale)

    def _persist(self, entry: JournalEntry) -> None:
        pass

    def _rewrite(self) -> None:
        pass


class FileJournal(DedupeJournal):
    def __init__(self, path: str | os.PathLike):
        super().__init__()
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._load()

    def _load(self) -> None:
        try:
            text = self.path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return
        except OSError as exc:
            raise JournalError(f"cannot read journal {self.path}: {exc}") from exc
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                entry = JournalEntry(
                    command_id=doc["id"],
                    phase=doc["phase"],
                    at=float(doc["at"]),
                    kind=doc.get("kind", ""),
                    ok=doc.get("ok"),
                    note=doc.get("note", ""),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                continue  # torn tail line; everything before it already applied
            self._entries[entry.command_id] = entry

    def _persist(self, entry: JournalEntry) -> None:
        doc = {"id": entry.command_id, "phase": entry.phase, "at": entry.at,
               "kind": entry.kind, "ok": entry.ok, "note": entry.note}
        line = json.dumps(doc, separators=(",", ":")) + "\n"
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise JournalError(f"cannot write journal {self.path}: {exc}") from exc

    def _rewrite(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                for entry in self._entries.values():
                    doc = {"id": entry.command_id, "phase": entry.phase, "at": entry.at,
                           "kind": entry.kind, "ok": entry.ok, "note": entry.note}
                    fh.write(json.dumps(doc, separators=(",", ":")) + "\n")
            os.replace(tmp, self.path)
        except OSError as exc:
            raise JournalError(f"cannot rewrite journal {self.path}: {exc}") from exc
