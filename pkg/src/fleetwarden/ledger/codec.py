"""Line codec for ledger records.

One record per line: a compact JSON object carrying an explicit record-type
tag ("status" / "command") and a schema version, so a reader can skip what
it does not understand without losing the rest of the file. Encoding is
deterministic (sorted keys) and `decode_record(encode_record(r)) == r`.

Decode failures are split into distinct categories so ledger readers can
skip-and-log instead of aborting:

  MalformedRecordError     not JSON / not an object / empty line
  UnknownRecordTypeError   unrecognized "type" tag
  UnknownSchemaVersionError unsupported "v"
  RecordValidationError    well-formed but violates a field invariant
"""

from __future__ import annotations

import json
from typing import Any

from .records import (
    CommandEntry,
    CommandKind,
    CommandState,
    ProcessInfo,
    Record,
    StatusEntry,
    Status,
    TrafficCounters,
)
from .records import RecordValidationError

SCHEMA_VERSION = 1

STATUS_TAG = "status"
COMMAND_TAG = "command"


class CodecError(ValueError):
    pass


class MalformedRecordError(CodecError):
    pass


class UnknownRecordTypeError(CodecError):
    pass


class UnknownSchemaVersionError(CodecError):
    pass


def encode_record(record: Record) -> bytes:
    """Encode a validated record as one UTF-8 line (newline included)."""
    if isinstance(record, StatusEntry):
        record.validate()
        doc: dict[str, Any] = {
            "type": STATUS_TAG,
            "v": SCHEMA_VERSION,
            "agent": record.agent,
            "seq": record.seq,
            "ts": record.timestamp,
            "status": record.status.value,
            "idle_seconds": record.idle_seconds,
            "processes": [[p.name, p.pid, p.memory_kb] for p in record.processes],
            "traffic": [
                record.traffic.rx_bytes,
                record.traffic.tx_bytes,
                record.traffic.rx_packets,
                record.traffic.tx_packets,
            ],
            "degraded": record.degraded,
            "traffic_reset": record.traffic_reset,
        }
    elif isinstance(record, CommandEntry):
        record.validate()
        doc = {
            "type": COMMAND_TAG,
            "v": SCHEMA_VERSION,
            "command_id": record.command_id,
            "target": record.target,
            "kind": record.kind.value,
            "issued_at": record.issued_at,
            "expires_at": record.expires_at,
            "state": record.state.value,
            "result_note": record.result_note,
        }
    else:
        raise MalformedRecordError(f"cannot encode {type(record).__name__}")
    line = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    if "\n" in line:
        raise MalformedRecordError("encoded record spans multiple lines")
    return line.encode("utf-8") + b"\n"


def decode_record(line: bytes | str) -> Record:
    """Decode one line into a record; tolerates arbitrary bytes without crashing."""
    if isinstance(line, bytes):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecordError(f"malformed record: {exc}") from exc
    else:
        text = line
    text = text.strip()
    if not text:
        raise MalformedRecordError("malformed record: empty line")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"malformed record: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedRecordError("malformed record: not an object")

    tag = doc.get("type")
    if tag not in (STATUS_TAG, COMMAND_TAG):
        raise UnknownRecordTypeError(f"unknown record type: {tag!r}")
    version = doc.get("v")
    if version != SCHEMA_VERSION:
        raise UnknownSchemaVersionError(f"unknown schema version: {version!r}")

    try:
        if tag == STATUS_TAG:
            record: Record = _decode_status(doc)
        else:
            record = _decode_command(doc)
    except RecordValidationError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedRecordError(f"malformed record: {exc}") from exc
    return record.validate()


def _require_int(doc: dict[str, Any], key: str) -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise RecordValidationError(key, "must be an integer")
    return value


def _require_number(doc: dict[str, Any], key: str) -> float:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordValidationError(key, "must be a number")
    return value


def _decode_status(doc: dict[str, Any]) -> StatusEntry:
    try:
        status = Status(doc["status"])
    except ValueError:
        raise RecordValidationError("status", f"unknown status {doc['status']!r}")
    raw_procs = doc["processes"]
    if not isinstance(raw_procs, list):
        raise RecordValidationError("processes", "must be a list")
    processes = tuple(ProcessInfo(name=p[0], pid=p[1], memory_kb=p[2]) for p in raw_procs)
    traffic_raw = doc["traffic"]
    if not isinstance(traffic_raw, list) or len(traffic_raw) != 4:
        raise RecordValidationError("traffic", "must be a 4-element list")
    traffic = TrafficCounters(*(int(v) for v in traffic_raw))
    return StatusEntry(
        agent=doc["agent"],
        seq=_require_int(doc, "seq"),
        timestamp=_require_number(doc, "ts"),
        status=status,
        idle_seconds=_require_int(doc, "idle_seconds"),
        processes=processes,
        traffic=traffic,
        degraded=bool(doc.get("degraded", False)),
        traffic_reset=bool(doc.get("traffic_reset", False)),
    )


def _decode_command(doc: dict[str, Any]) -> CommandEntry:
    try:
        kind = CommandKind(doc["kind"])
    except ValueError:
        raise RecordValidationError("kind", f"unknown command kind {doc['kind']!r}")
    try:
        state = CommandState(doc["state"])
    except ValueError:
        raise RecordValidationError("state", f"unknown command state {doc['state']!r}")
    note = doc.get("result_note")
    if note is not None and not isinstance(note, str):
        raise RecordValidationError("result_note", "must be a string or null")
    return CommandEntry(
        command_id=doc["command_id"],
        target=doc["target"],
        kind=kind,
        issued_at=_require_number(doc, "issued_at"),
        expires_at=_require_number(doc, "expires_at"),
        state=state,
        result_note=note,
    )
