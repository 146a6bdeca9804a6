from .events import EventKind, FleetEvent, Snapshot, apply_event
from .store import (
    EventStore,
    FileEventStore,
    MemoryEventStore,
    StoreCorruptionError,
    StoreError,
    replay,
)
from .summarize import DEFAULT_SUMMARY_PERIOD, HeartbeatSummarizer, SummaryDraft

__all__ = [
    "DEFAULT_SUMMARY_PERIOD",
    "EventKind",
    "EventStore",
    "FileEventStore",
    "FleetEvent",
    "HeartbeatSummarizer",
    "MemoryEventStore",
    "Snapshot",
    "StoreCorruptionError",
    "StoreError",
    "SummaryDraft",
    "apply_event",
    "replay",
]
