"""Injectable time sources.

Every timestamp in the system flows through a Clock so that tests and the
simulation harness can run on a controllable fake clock instead of wall time.
"""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now(self) -> float:
        """Seconds since the epoch, UTC."""
        ...


class SystemClock:
    def now(self) -> float:
        return time.time()


class FakeClock:
    """Manually advanced clock for tests and simulation.

    Time only moves when `advance` or `set_time` is called.
    """

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise ValueError("cannot advance clock backwards")
        self._now += seconds
        return self._now

    def set_time(self, t: float) -> float:
        if t < self._now:
            raise ValueError("cannot move clock backwards")
        self._now = float(t)
        return self._now
