from .accounting import (
    EnergyBreakdown,
    SavingsReport,
    StateInterval,
    TimelineError,
    always_on_baseline,
    derive_state_intervals,
    energy_from_summaries,
    energy_wh,
    savings_report,
)
from .model import (
    CRT_MODEL,
    DEFAULT_MODELS,
    DisplayClass,
    LCD_MODEL,
    MachineState,
    PowerModel,
    model_for,
    power_draw,
)

__all__ = [
    "CRT_MODEL",
    "DEFAULT_MODELS",
    "DisplayClass",
    "EnergyBreakdown",
    "LCD_MODEL",
    "MachineState",
    "PowerModel",
    "SavingsReport",
    "StateInterval",
    "TimelineError",
    "always_on_baseline",
    "derive_state_intervals",
    "energy_from_summaries",
    "energy_wh",
    "model_for",
    "power_draw",
    "savings_report",
]
