"""Shared-directory ledger.

Layout under the ledger root:

    status/<agent-id>.log   one append-only file per reporting agent
    commands.log            commands and their transitions, all writers

One record per newline-terminated UTF-8 line. Appends take an advisory
lock and write the whole line in a single system call, so concurrent
writers never interleave partial records. Readers only consume complete
lines: a torn final line (no trailing newline yet) is left for the next
read, and undecodable lines are counted and skipped, never fatal.

`rotate()` renames an oversized file to `<name>.1` (one generation kept).
Rotation resets live cursors for that file to its new start; callers
holding cursors across a rotation should rebuild their derived state.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Iterable, Iterator

from .base import DECODE_ERRORS, LedgerCursor, LedgerUnavailableError, LocalLedger
from .codec import decode_record, encode_record
from .records import AgentId, CommandEntry, Record, StatusEntry, validate_agent_id

try:
    import fcntl
except ImportError:  # non-posix; single-writer deployments only
    fcntl = None  # type: ignore[assignment]

STATUS_DIR = "status"
COMMANDS_FILE = "commands.log"


class FileLedger(LocalLedger):
    def __init__(self, root: str | os.PathLike, author: AgentId | None = None, durable: bool = False):
        super().__init__(author)
        self.root = Path(root)
        self._durable = durable
        self._malformed = 0
        self._count_lock = threading.Lock()
        try:
            (self.root / STATUS_DIR).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise LedgerUnavailableError(f"cannot open ledger root {self.root}: {exc}") from exc

    # -- paths

    def _status_path(self, agent: AgentId) -> Path:
        validate_agent_id(agent)
        return self.root / STATUS_DIR / f"{agent}.log"

    def _commands_path(self) -> Path:
        return self.root / COMMANDS_FILE

    def _record_path(self, record: Record) -> Path:
        if isinstance(record, StatusEntry):
            return self._status_path(record.agent)
        return self._commands_path()

    # -- writing

    def _append_record(self, record: Record) -> int:
        line = encode_record(record)
        path = self._record_path(record)
        try:
            fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
        except OSError as exc:
            raise LedgerUnavailableError(f"cannot open {path}: {exc}") from exc
        try:
            if fcntl is not None:
                fcntl.flock(fd, fcntl.LOCK_EX)
            try:
                position = os.fstat(fd).st_size
                os.write(fd, line)
                if self._durable:
                    os.fsync(fd)
            finally:
                if fcntl is not None:
                    fcntl.flock(fd, fcntl.LOCK_UN)
        except OSError as exc:
            raise LedgerUnavailableError(f"append to {path} failed: {exc}") from exc
        finally:
            os.close(fd)
        return position

    # -- reading

    def _note_malformed(self, n: int = 1) -> None:
        if n:
            with self._count_lock:
                self._malformed += n

    def _read_complete_lines(self, path: Path, offset: int = 0) -> tuple[list[bytes], int]:
        """All complete lines from `offset`, and the offset consumed up to."""
        try:
            with open(path, "rb") as fh:
                fh.seek(offset)
                blob = fh.read()
        except FileNotFoundError:
            return [], offset
        except OSError as exc:
            raise LedgerUnavailableError(f"cannot read {path}: {exc}") from exc
        end = blob.rfind(b"\n")
        if end < 0:
            return [], offset
        complete = blob[: end + 1]
        return complete.splitlines(), offset + len(complete)

    def _decode_lines(self, lines: Iterable[bytes]) -> Iterator[Record]:
        for line in lines:
            try:
                yield decode_record(line)
            except DECODE_ERRORS:
                self._note_malformed()

    def _iter_file(self, path: Path) -> Iterator[Record]:
        rotated = path.with_name(path.name + ".1")
        for part in (rotated, path):
            lines, _ = self._read_complete_lines(part)
            yield from self._decode_lines(lines)

    def _status_files(self) -> list[Path]:
        status_dir = self.root / STATUS_DIR
        if not status_dir.is_dir():
            return []
        names = set()
        for p in status_dir.iterdir():
            if p.suffix == ".log":
                names.add(p)
            elif p.name.endswith(".log.1"):  # only the rotated part remains
                names.add(p.with_name(p.name[: -len(".1")]))
        return sorted(names)

    def _iter_status(self, agent: AgentId | None = None) -> Iterator[StatusEntry]:
        paths = [self._status_path(agent)] if agent is not None else self._status_files()
        for path in paths:
            for record in self._iter_file(path):
                if isinstance(record, StatusEntry):
                    yield record

    def _iter_commands(self) -> Iterator[CommandEntry]:
        for record in self._iter_file(self._commands_path()):
            if isinstance(record, CommandEntry):
                yield record

    def read_new(self, cursor: LedgerCursor | None = None) -> tuple[list[Record], LedgerCursor]:
        offsets: dict[str, int] = dict(cursor.position) if cursor is not None else {}
        records: list[Record] = []
        paths = [self._commands_path()] + self._status_files()
        for path in paths:
            key = str(path.relative_to(self.root))
            offset = int(offsets.get(key, 0))
            try:
                size = path.stat().st_size
            except FileNotFoundError:
                size = 0
            if offset > size:  # rotated underneath us; restart at the new file
                offset = 0
            lines, consumed = self._read_complete_lines(path, offset)
            records.extend(self._decode_lines(lines))
            offsets[key] = consumed
        return records, LedgerCursor(offsets)

    @property
    def malformed_count(self) -> int:
        with self._count_lock:
            return self._malformed

    # -- maintenance

    def rotate(self, max_bytes: int) -> list[Path]:
        """Rename any log file larger than `max_bytes` to `<name>.1`."""
        rotated = []
        for path in [self._commands_path()] + self._status_files():
            try:
                if path.stat().st_size <= max_bytes:
                    continue
            except FileNotFoundError:
                continue
            os.replace(path, path.with_name(path.name + ".1"))
            rotated.append(path)
        return rotated

    def for_author(self, author: AgentId) -> "FileLedger":
        """An agent-scoped handle over the same directory."""
        return FileLedger(self.root, author=author, durable=self._durable)
