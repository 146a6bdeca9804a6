"""Per-machine power models.

The default figures come from measured lab averages: 210 W for CRT-display
machines, 160 W for LCD-display machines, applied to both the active and
idle states because only one average per display class was measured. The
5 W sleep draw is a configurable stand-in, not a measured value.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class MachineState(str, Enum):
    ACTIVE = "ACTIVE"
    IDLE = "IDLE"
    SLEEP = "SLEEP"
    OFF = "OFF"


class DisplayClass(str, Enum):
    CRT = "CRT"
    LCD = "LCD"
    OTHER = "OTHER"


@dataclass(frozen=True)
class PowerModel:
    active_watts: float
    idle_watts: float
    sleep_watts: float = 5.0
    off_watts: float = 0.0

    def __post_init__(self):
        if not (0 <= self.off_watts <= self.sleep_watts <= self.idle_watts <= self.active_watts):
            raise ValueError(
                "power model must satisfy off <= sleep <= idle <= active, all non-negative"
            )

    def draw(self, state: MachineState) -> float:
        return {
            MachineState.ACTIVE: self.active_watts,
            MachineState.IDLE: self.idle_watts,
            MachineState.SLEEP: self.sleep_watts,
            MachineState.OFF: self.off_watts,
        }[state]


CRT_MODEL = PowerModel(active_watts=210.0, idle_watts=210.0)
LCD_MODEL = PowerModel(active_watts=160.0, idle_watts=160.0)

DEFAULT_MODELS: dict[DisplayClass, PowerModel] = {
    DisplayClass.CRT: CRT_MODEL,
    DisplayClass.LCD: LCD_MODEL,
    DisplayClass.OTHER: LCD_MODEL,
}


def power_draw(model: PowerModel, state: MachineState) -> float:
    return model.draw(state)


def model_for(display_class: DisplayClass | str) -> PowerModel:
    return DEFAULT_MODELS[DisplayClass(display_class)]
