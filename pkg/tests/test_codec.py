import json
import random

import pytest
from hypothesis import given, strategies as st

from fleetwarden.ledger import (
    CommandEntry,
    CommandKind,
    CommandState,
    MalformedRecordError,
    ProcessInfo,
    RecordValidationError,
    Status,
    StatusEntry,
    TrafficCounters,
    UnknownRecordTypeError,
    UnknownSchemaVersionError,
    decode_record,
    encode_record,
)

from conftest import random_record


def test_status_roundtrip_basic():
    entry = StatusEntry(
        agent="lab1-pc07",
        seq=3,
        timestamp=1700000000.0,
        status=Status.IDLE,
        idle_seconds=612,
        processes=(ProcessInfo("calc", 12, 2048), ProcessInfo("editor", 40, 8192)),
        traffic=TrafficCounters(1000, 500, 10, 5),
    )
    line = encode_record(entry)
    assert line.endswith(b"\n")
    assert line.count(b"\n") == 1
    assert b'"status"' in line
    assert decode_record(line) == entry


def test_command_roundtrip_basic():
    cmd = CommandEntry(
        command_id="cmd-1",
        target="lab1-pc07",
        kind=CommandKind.SHUTDOWN,
        issued_at=100.0,
        expires_at=400.0,
    )
    line = encode_record(cmd)
    assert line.count(b"\n") == 1
    assert decode_record(line) == cmd


def test_zero_idle_busy_is_valid():
    entry = StatusEntry("pc", 0, 0.0, Status.BUSY, 0)
    assert decode_record(encode_record(entry)) == entry


def test_roundtrip_randomized():
    rng = random.Random(1234)
    for _ in range(500):
        record = random_record(rng)
        assert decode_record(encode_record(record)) == record


@given(st.integers(min_value=0, max_value=10**6), st.booleans())
def test_roundtrip_idle_values(idle, degraded):
    entry = StatusEntry("pc-a", 1, 50.0, Status.BUSY, idle, degraded=degraded)
    assert decode_record(encode_record(entry)) == entry


def test_empty_line_is_malformed():
    with pytest.raises(MalformedRecordError):
        decode_record(b"")
    with pytest.raises(MalformedRecordError):
        decode_record(b"   \n")


def test_garbage_bytes_are_malformed():
    with pytest.raises(MalformedRecordError):
        decode_record(b"\xff\xfe\x00garbage")
    with pytest.raises(MalformedRecordError):
        decode_record(b"not json at all")
    with pytest.raises(MalformedRecordError):
        decode_record(b"[1,2,3]")


def test_unknown_type_tag():
    with pytest.raises(UnknownRecordTypeError):
        decode_record(json.dumps({"type": "wibble", "v": 1}).encode())


def test_unknown_schema_version():
    line = encode_record(StatusEntry("pc", 0, 0.0, Status.BUSY, 0))
    doc = json.loads(line)
    doc["v"] = 99
    with pytest.raises(UnknownSchemaVersionError):
        decode_record(json.dumps(doc).encode())


def test_negative_idle_seconds_is_invariant_violation():
    line = encode_record(StatusEntry("pc", 0, 0.0, Status.BUSY, 0))
    doc = json.loads(line)
    doc["idle_seconds"] = -5
    with pytest.raises(RecordValidationError) as exc:
        decode_record(json.dumps(doc).encode())
    assert "idle_seconds" in str(exc.value)


def test_invalid_expiry_is_invariant_violation():
    with pytest.raises(RecordValidationError) as exc:
        encode_record(
            CommandEntry("c", "pc", CommandKind.RESTART, issued_at=10.0, expires_at=10.0)
        )
    assert "expires_at" in str(exc.value)


def test_agent_id_rules():
    for bad in ("", "a/b", "a\\b", "x" * 129, "a\nb"):
        with pytest.raises(RecordValidationError):
            encode_record(StatusEntry(bad, 0, 0.0, Status.BUSY, 0))


def test_encoding_is_deterministic():
    entry = StatusEntry("pc", 5, 123.5, Status.IDLE, 700, (ProcessInfo("a", 1),))
    assert encode_record(entry) == encode_record(entry)
