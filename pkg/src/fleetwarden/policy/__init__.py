from .engine import DEFAULT_WORK_HOURS, PolicyConfig, evaluate
from .schedule import (
    ScheduleParseError,
    WeeklySchedule,
    format_schedule,
    parse_schedule,
)

__all__ = [
    "DEFAULT_WORK_HOURS",
    "PolicyConfig",
    "ScheduleParseError",
    "WeeklySchedule",
    "evaluate",
    "format_schedule",
    "parse_schedule",
]
