"""Where an agent's observations come from.

Three source kinds feed a heartbeat: the time of the last keyboard/mouse
input, the process table, and cumulative interface traffic counters. Each
has a real OS-backed implementation and a scripted implementation driven
by a trace file, so the same agent code runs against either.

Trace file format, one event per line (t in seconds from trace start):

    <t> input
    <t> proc <name> <pid> [<memory_kb>]
    <t> traffic <rx_bytes> <tx_bytes> [<rx_packets> <tx_packets>]

Events take effect at time t and persist until overridden.
"""

from __future__ import annotations

import bisect
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from ..ledger.records import ProcessInfo, TrafficCounters


class SourceUnavailable(Exception):
    """The underlying OS facility could not be read this tick."""


class InputSource(Protocol):
    def last_input_at(self) -> float: ...


class ProcessSource(Protocol):
    def processes(self) -> list[ProcessInfo]: ...


class TrafficSource(Protocol):
    def counters(self) -> TrafficCounters: ...


# -- real backends


class FileMtimeInputSource:
    """Last-input time from the newest mtime among watched device nodes.

    Reads only timestamps, never input content. /dev/input/* works on most
    Linux consoles; an X/Wayland idle query would need a display session.
    """

    def __init__(self, watch: list[str] | None = None):
        self.watch = watch or ["/dev/input"]

    def last_input_at(self) -> float:
        newest: float | None = None
        for target in self.watch:
            path = Path(target)
            candidates = [path]
            if path.is_dir():
                try:
                    candidates = list(path.iterdir()) or [path]
                except OSError:
                    continue
            for candidate in candidates:
                try:
                    mtime = candidate.stat().st_mtime
                except OSError:
                    continue
                if newest is None or mtime > newest:
                    newest = mtime
        if newest is None:
            raise SourceUnavailable(f"no readable input devices among {self.watch}")
        return newest


class PsutilProcessSource:
    def processes(self) -> list[ProcessInfo]:
        try:
            import psutil
        except ImportError as exc:
            raise SourceUnavailable("psutil not installed") from exc
        out = []
        try:
            for proc in psutil.process_iter(["name", "pid", "memory_info"]):
                info = proc.info
                name = info.get("name") or ""
                if not name:
                    continue
                mem = info.get("memory_info")
                out.append(
                    ProcessInfo(
                        name=name,
                        pid=int(info["pid"]),
                        memory_kb=int(mem.rss // 1024) if mem else 0,
                    )
                )
        except Exception as exc:
            raise SourceUnavailable(f"process table unreadable: {exc}") from exc
        return out


class PsutilTrafficSource:
    def counters(self) -> TrafficCounters:
        try:
            import psutil
        except ImportError as exc:
            raise SourceUnavailable("psutil not installed") from exc
        try:
            io = psutil.net_io_counters()
        except Exception as exc:
            raise SourceUnavailable(f"interface counters unreadable: {exc}") from exc
        return TrafficCounters(
            rx_bytes=io.bytes_recv,
            tx_bytes=io.bytes_sent,
            rx_packets=io.packets_recv,
            tx_packets=io.packets_sent,
        )


# -- scripted backends


class TraceParseError(ValueError):
    pass


@dataclass
class ScriptedWorld:
    """A machine's scripted observable history, indexed by time."""

    input_times: list[float] = field(default_factory=list)
    proc_events: list[tuple[float, ProcessInfo]] = field(default_factory=list)
    traffic_events: list[tuple[float, TrafficCounters]] = field(default_factory=list)

    def last_input_at(self, t: float) -> float:
        idx = bisect.bisect_right(self.input_times, t)
        if idx == 0:
            return 0.0
        return self.input_times[idx - 1]

    def processes_at(self, t: float) -> list[ProcessInfo]:
        by_pid: dict[int, ProcessInfo] = {}
        for when, proc in self.proc_events:
            if when > t:
                break
            by_pid[proc.pid] = proc
        return list(by_pid.values())

    def traffic_at(self, t: float) -> TrafficCounters:
        current = TrafficCounters()
        for when, counters in self.traffic_events:
            if when > t:
                break
            current = counters
        return current

    def sorted(self) -> "ScriptedWorld":
        self.input_times.sort()
        self.proc_events.sort(key=lambda e: e[0])
        self.traffic_events.sort(key=lambda e: e[0])
        return self


def parse_trace(text: str, origin: str = "<trace>") -> ScriptedWorld:
    world = ScriptedWorld()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            t = float(parts[0])
            kind = parts[1]
            if kind == "input" and len(parts) == 2:
                world.input_times.append(t)
            elif kind == "proc" and len(parts) in (4, 5):
                memory = int(parts[4]) if len(parts) == 5 else 0
                world.proc_events.append((t, ProcessInfo(parts[2], int(parts[3]), memory)))
            elif kind == "traffic" and len(parts) in (4, 6):
                rxp, txp = (int(parts[4]), int(parts[5])) if len(parts) == 6 else (0, 0)
                world.traffic_events.append(
                    (t, TrafficCounters(int(parts[2]), int(parts[3]), rxp, txp))
                )
            else:
                raise ValueError(f"unrecognized event {kind!r}")
        except (ValueError, IndexError) as exc:
            raise TraceParseError(f"{origin}:{lineno}: {exc}") from exc
    return world.sorted()


def load_trace(path: str | os.PathLike) -> ScriptedWorld:
    p = Path(path)
    return parse_trace(p.read_text(encoding="utf-8"), origin=str(p))


class ScriptedInputSource:
    def __init__(self, world: ScriptedWorld, clock):
        self.world = world
        self.clock = clock
        self.fail = False  # set True to simulate a dead input hook

    def last_input_at(self) -> float:
        if self.fail:
            raise SourceUnavailable("scripted input failure")
        return self.world.last_input_at(self.clock.now())


class ScriptedProcessSource:
    def __init__(self, world: ScriptedWorld, clock):
        self.world = world
        self.clock = clock
        self.fail = False

    def processes(self) -> list[ProcessInfo]:
        if self.fail:
            raise SourceUnavailable("scripted process failure")
        return self.world.processes_at(self.clock.now())


class ScriptedTrafficSource:
    def __init__(self, world: ScriptedWorld, clock):
        self.world = world
        self.clock = clock
        self.fail = False

    def counters(self) -> TrafficCounters:
        if self.fail:
            raise SourceUnavailable("scripted traffic failure")
        return self.world.traffic_at(self.clock.now())
