"""Heartbeat downsampling.

Raw heartbeats are too chatty to keep forever (110 machines at one entry
per 30 s would dominate storage), so the controller folds them into one
HEARTBEAT_SUMMARY event per agent per period, carrying how many seconds of
the period the machine spent in each state. Occupancy assumes the status
held since the previous heartbeat, the same piecewise-constant reading the
energy timeline uses, so summaries stay within one period of the truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..ledger.records import Status, StatusEntry

DEFAULT_SUMMARY_PERIOD = 300.0

ACTIVE = "ACTIVE"
IDLE = "IDLE"


def _occupancy_state(status: Status) -> str:
    return IDLE if status is Status.IDLE else ACTIVE


@dataclass
class _AgentWindow:
    period_start: float
    prev_ts: float
    prev_state: str
    occupancy: dict[str, float] = field(default_factory=dict)
    last_seq: int = 0


@dataclass(frozen=True)
class SummaryDraft:
    agent: str
    at: float
    payload: dict[str, Any]


class HeartbeatSummarizer:
    def __init__(self, period: float = DEFAULT_SUMMARY_PERIOD):
        if period <= 0:
            raise ValueError("summary period must be positive")
        self.period = period
        self._windows: dict[str, _AgentWindow] = {}

    def _emit(self, agent: str, window: _AgentWindow, end: float) -> SummaryDraft:
        payload = {
            "period_start": window.period_start,
            "period_end": end,
            "occupancy_seconds": {k: round(v, 6) for k, v in window.occupancy.items() if v > 0},
            "last_seq": window.last_seq,
        }
        return SummaryDraft(agent=agent, at=end, payload=payload)

    def _advance(self, agent: str, window: _AgentWindow, upto: float) -> list[SummaryDraft]:
        drafts = []
        while upto >= window.period_start + self.period:
            boundary = window.period_start + self.period
            window.occupancy[window.prev_state] = (
                window.occupancy.get(window.prev_state, 0.0) + boundary - window.prev_ts
            )
            drafts.append(self._emit(agent, window, boundary))
            window.period_start = boundary
            window.prev_ts = boundary
            window.occupancy = {}
        if upto > window.prev_ts:
            window.occupancy[window.prev_state] = (
                window.occupancy.get(window.prev_state, 0.0) + upto - window.prev_ts
            )
            window.prev_ts = upto
        return drafts

    def observe(self, entry: StatusEntry) -> list[SummaryDraft]:
        """Feed one heartbeat; returns summaries for any periods it completes."""
        window = self._windows.get(entry.agent)
        state = _occupancy_state(entry.status)
        if window is None or entry.timestamp < window.prev_ts:
            self._windows[entry.agent] = _AgentWindow(
                period_start=(entry.timestamp // self.period) * self.period,
                prev_ts=entry.timestamp,
                prev_state=state,
                last_seq=entry.seq,
            )
            return []
        drafts = self._advance(entry.agent, window, entry.timestamp)
        window.prev_state = state
        window.last_seq = entry.seq
        return drafts

    def flush(self) -> list[SummaryDraft]:
        """Emit partial summaries for every open window (e.g. at shutdown)."""
        drafts = []
        for agent, window in self._windows.items():
            if window.occupancy:
                drafts.append(self._emit(agent, window, window.prev_ts))
        self._windows.clear()
        return drafts
