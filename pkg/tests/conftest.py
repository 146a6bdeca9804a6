"""Shared generators: randomized valid records used across the suite.

These double as the roundtrip oracle input: any record they produce is
valid by construction, so decode(encode(r)) == r must hold for all of them.
"""

from __future__ import annotations

import random
import string

import pytest

from fleetwarden.ledger import (
    CommandEntry,
    CommandKind,
    CommandState,
    ProcessInfo,
    Status,
    StatusEntry,
    TrafficCounters,
)

AGENT_ALPHABET = string.ascii_lowercase + string.digits + "-_."


def random_agent_id(rng: random.Random) -> str:
    return "".join(rng.choice(AGENT_ALPHABET) for _ in range(rng.randint(1, 24)))


def random_process(rng: random.Random) -> ProcessInfo:
    name = "".join(rng.choice(string.ascii_letters) for _ in range(rng.randint(1, 12)))
    if rng.random() < 0.3:
        name += ".exe"
    return ProcessInfo(name=name, pid=rng.randint(1, 65535), memory_kb=rng.randint(0, 1 << 20))


def random_status_entry(rng: random.Random, agent: str | None = None) -> StatusEntry:
    return StatusEntry(
        agent=agent or random_agent_id(rng),
        seq=rng.randint(0, 10_000),
        timestamp=rng.randint(0, 2_000_000_000) + rng.choice([0, 0.5, 0.25]),
        status=rng.choice([Status.BUSY, Status.IDLE]),
        idle_seconds=rng.randint(0, 100_000),
        processes=tuple(random_process(rng) for _ in range(rng.randint(0, 8))),
        traffic=TrafficCounters(
            rx_bytes=rng.randint(0, 1 << 40),
            tx_bytes=rng.randint(0, 1 << 40),
            rx_packets=rng.randint(0, 1 << 30),
            tx_packets=rng.randint(0, 1 << 30),
        ),
        degraded=rng.random() < 0.1,
        traffic_reset=rng.random() < 0.1,
    )


def random_command_entry(rng: random.Random, target: str | None = None) -> CommandEntry:
    issued = float(rng.randint(0, 2_000_000_000))
    return CommandEntry(
        command_id="cmd-" + "".join(rng.choice(string.hexdigits.lower()) for _ in range(12)),
        target=target or random_agent_id(rng),
        kind=rng.choice(list(CommandKind)),
        issued_at=issued,
        expires_at=issued + rng.randint(1, 3600),
        state=rng.choice(list(CommandState)),
        result_note=rng.choice([None, "ok", "failure: " + random_agent_id(rng)]),
    )


def random_record(rng: random.Random):
    return random_status_entry(rng) if rng.random() < 0.6 else random_command_entry(rng)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xF1EE7)
