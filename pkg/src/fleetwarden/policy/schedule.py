"""Weekly work-hours schedule.

Grammar: comma- or newline-separated items of `<DayRange> <HH:MM>-<HH:MM>`,
days Mon..Sun, day ranges inclusive (wrapping allowed: Sat-Mon). Intervals
are half-open [start, end) in local minutes; 24:00 is a valid end. Within
a day, intervals must be disjoint; overlap or inversion is a parse error
carrying the offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

DAY_NAMES = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
_DAY_INDEX = {name: i for i, name in enumerate(DAY_NAMES)}

_ITEM_RE = re.compile(
    r"^(?P<d1>Mon|Tue|Wed|Thu|Fri|Sat|Sun)(?:-(?P<d2>Mon|Tue|Wed|Thu|Fri|Sat|Sun))?"
    r"\s+(?P<h1>\d{1,2}):(?P<m1>\d{2})-(?P<h2>\d{1,2}):(?P<m2>\d{2})$"
)

MINUTES_PER_DAY = 24 * 60


class ScheduleParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class WeeklySchedule:
    """Per-day sorted (start_minute, end_minute) half-open intervals."""

    days: tuple[tuple[tuple[int, int], ...], ...]  # 7 entries, Mon first

    def covers(self, dt: datetime) -> bool:
        minute = dt.hour * 60 + dt.minute
        return any(start <= minute < end for start, end in self.days[dt.weekday()])

    def interval_count(self) -> int:
        return sum(len(day) for day in self.days)

    def is_empty(self) -> bool:
        return self.interval_count() == 0


def _expand_days(d1: str, d2: str | None) -> list[int]:
    start = _DAY_INDEX[d1]
    end = _DAY_INDEX[d2] if d2 else start
    if start <= end:
        return list(range(start, end + 1))
    return list(range(start, 7)) + list(range(0, end + 1))


def _minutes(hours: str, minutes: str, lineno: int) -> int:
    h, m = int(hours), int(minutes)
    if m > 59 or h > 24 or (h == 24 and m != 0):
        raise ScheduleParseError(lineno, f"bad time {hours}:{minutes}")
    return h * 60 + m


def parse_schedule(text: str) -> WeeklySchedule:
    per_day: list[list[tuple[int, int]]] = [[] for _ in range(7)]
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        line = line.split("#", 1)[0]
        for chunk in line.split(","):
            item = chunk.strip()
            if not item:
                continue
            match = _ITEM_RE.match(item)
            if match is None:
                raise ScheduleParseError(lineno, f"cannot parse item {item!r}")
            start = _minutes(match["h1"], match["m1"], lineno)
            end = _minutes(match["h2"], match["m2"], lineno)
            if end <= start:
                raise ScheduleParseError(lineno, f"inverted interval in {item!r}")
            for day in _expand_days(match["d1"], match["d2"]):
                for other_start, other_end in per_day[day]:
                    if start < other_end and other_start < end:
                        raise ScheduleParseError(
                            lineno, f"overlapping interval in {item!r} on {DAY_NAMES[day]}"
                        )
                per_day[day].append((start, end))
    return WeeklySchedule(days=tuple(tuple(sorted(day)) for day in per_day))


def _fmt_minutes(total: int) -> str:
    return f"{total // 60:02d}:{total % 60:02d}"


def format_schedule(schedule: WeeklySchedule) -> str:
    """Canonical text form; parse(format(s)) == s."""
    items: list[str] = []
    day = 0
    while day < 7:
        intervals = schedule.days[day]
        if not intervals:
            day += 1
            continue
        run_end = day
        while run_end + 1 < 7 and schedule.days[run_end + 1] == intervals:
            run_end += 1
        day_part = DAY_NAMES[day] if run_end == day else f"{DAY_NAMES[day]}-{DAY_NAMES[run_end]}"
        for start, end in intervals:
            items.append(f"{day_part} {_fmt_minutes(start)}-{_fmt_minutes(end)}")
        day = run_end + 1
    return ", ".join(items)
