from .harness import (
    ACK_CONFIRMED,
    ACTION_ISSUED,
    COMMAND_EXECUTED,
    DETAIL_ACCESSED,
    LIST_DISPLAYED,
    Predicate,
    SCAN_COMPLETED,
    STARTUP_RETRIEVAL,
    SequenceResult,
    SimTrace,
    SimWorld,
    TraceStep,
    assert_sequence,
    command_conservation,
    run_scenario,
    seq7_predicates,
)
from .scenario import (
    AdminAction,
    BUILTINS,
    Scenario,
    ScenarioError,
    SimMachine,
    lab_scenario,
    load_scenario,
    scenario_from_mapping,
    seq7_scenario,
    suspicious_scenario,
)

__all__ = [
    "ACK_CONFIRMED",
    "ACTION_ISSUED",
    "AdminAction",
    "BUILTINS",
    "COMMAND_EXECUTED",
    "DETAIL_ACCESSED",
    "LIST_DISPLAYED",
    "Predicate",
    "SCAN_COMPLETED",
    "STARTUP_RETRIEVAL",
    "Scenario",
    "ScenarioError",
    "SequenceResult",
    "SimMachine",
    "SimTrace",
    "SimWorld",
    "TraceStep",
    "assert_sequence",
    "command_conservation",
    "lab_scenario",
    "load_scenario",
    "run_scenario",
    "scenario_from_mapping",
    "seq7_predicates",
    "seq7_scenario",
    "suspicious_scenario",
]
