"""Per-tick observation sampling and the BUSY/IDLE rule.

The idle rule reads the admin threshold as a countdown: a machine is IDLE
once the full threshold has elapsed with no keyboard/mouse input, boundary
inclusive (idle_seconds >= threshold). Every sampler fails safe: a dead
source yields a degraded, BUSY-leaning observation rather than an error,
so the fleet never powers off a machine it cannot observe.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ledger.records import MAX_PROCESS_LIST, ProcessInfo, Status, TrafficCounters
from .sources import InputSource, ProcessSource, SourceUnavailable, TrafficSource


@dataclass(frozen=True)
class ActivitySample:
    sampled_at: float
    last_input_at: float
    idle_seconds: int
    degraded: bool = False


def sample_activity(now: float, input_source: InputSource) -> ActivitySample:
    """Idle time as of `now`; clamped at 0 if the last input is in the future."""
    try:
        last_input = input_source.last_input_at()
    except SourceUnavailable:
        # Fail-BUSY: unobservable machines report zero idle.
        return ActivitySample(sampled_at=now, last_input_at=now, idle_seconds=0, degraded=True)
    idle = max(0, int(now - last_input))
    return ActivitySample(sampled_at=now, last_input_at=last_input, idle_seconds=idle)


def determine_status(idle_seconds: int, threshold_seconds: int) -> Status:
    """IDLE once the inactivity countdown of length `threshold_seconds` runs out."""
    if threshold_seconds <= 0:
        raise ValueError("threshold_seconds must be positive")
    if idle_seconds < 0:
        raise ValueError("idle_seconds must be non-negative")
    return Status.IDLE if idle_seconds >= threshold_seconds else Status.BUSY


def sample_processes(process_source: ProcessSource) -> tuple[tuple[ProcessInfo, ...], bool]:
    """Current process list, deduplicated by pid (first wins), name-sorted.

    Returns (processes, degraded); a dead source yields an empty list.
    """
    try:
        raw = process_source.processes()
    except SourceUnavailable:
        return (), True
    by_pid: dict[int, ProcessInfo] = {}
    for proc in raw:
        if proc.pid not in by_pid:
            by_pid[proc.pid] = proc
    ordered = sorted(by_pid.values(), key=lambda p: (p.name, p.pid))
    return tuple(ordered[:MAX_PROCESS_LIST]), False


@dataclass(frozen=True)
class TrafficSample:
    counters: TrafficCounters
    reset: bool = False
    degraded: bool = False


def sample_traffic(
    counter_source: TrafficSource, previous: TrafficCounters | None
) -> TrafficSample:
    """Cumulative counters; a backwards step means the source reset.

    On reset the raw new values are reported with the reset flag set. On
    source failure the previous counters are repeated, degraded.
    """
    try:
        current = counter_source.counters()
    except SourceUnavailable:
        return TrafficSample(counters=previous or TrafficCounters(), degraded=True)
    if previous is not None and (
        current.rx_bytes < previous.rx_bytes
        or current.tx_bytes < previous.tx_bytes
        or current.rx_packets < previous.rx_packets
        or current.tx_packets < previous.tx_packets
    ):
        return TrafficSample(counters=current, reset=True)
    return TrafficSample(counters=current)
