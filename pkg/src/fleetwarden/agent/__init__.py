from .config import AgentConfig, ConfigError, LedgerConfig, load_agent_config
from .daemon import Agent, AgentSources, SimulatedCrash
from .journal import DedupeJournal, FileJournal, JournalError
from .platform_actions import ActionOutcome, LinuxPlatform, PlatformAction, SimulatedPlatform
from .sampling import (
    ActivitySample,
    TrafficSample,
    determine_status,
    sample_activity,
    sample_processes,
    sample_traffic,
)
from .sources import (
    FileMtimeInputSource,
    PsutilProcessSource,
    PsutilTrafficSource,
    ScriptedInputSource,
    ScriptedProcessSource,
    ScriptedTrafficSource,
    ScriptedWorld,
    SourceUnavailable,
    TraceParseError,
    load_trace,
    parse_trace,
)

__all__ = [
    "ActionOutcome",
    "ActivitySample",
    "Agent",
    "AgentConfig",
    "AgentSources",
    "ConfigError",
    "DedupeJournal",
    "FileJournal",
    "FileMtimeInputSource",
    "JournalError",
    "LedgerConfig",
    "LinuxPlatform",
    "PlatformAction",
    "PsutilProcessSource",
    "PsutilTrafficSource",
    "ScriptedInputSource",
    "ScriptedProcessSource",
    "ScriptedTrafficSource",
    "ScriptedWorld",
    "SimulatedCrash",
    "SimulatedPlatform",
    "SourceUnavailable",
    "TraceParseError",
    "TrafficSample",
    "determine_status",
    "load_agent_config",
    "load_trace",
    "parse_trace",
    "sample_activity",
    "sample_processes",
    "sample_traffic",
]
