from .base import (
    DECODE_ERRORS,
    EXPIRED_NOTE,
    Ledger,
    LedgerAuthorizationError,
    LedgerCursor,
    LedgerError,
    LedgerUnavailableError,
    LifecycleError,
    UnknownCommandError,
)
from .codec import (
    CodecError,
    MalformedRecordError,
    UnknownRecordTypeError,
    UnknownSchemaVersionError,
    decode_record,
    encode_record,
)
from .filestore import FileLedger
from .memory import MemoryLedger
from .records import (
    AgentId,
    CommandEntry,
    CommandKind,
    CommandState,
    ProcessInfo,
    Record,
    RecordValidationError,
    Status,
    StatusEntry,
    TERMINAL_STATES,
    TrafficCounters,
    validate_agent_id,
)

__all__ = [
    "AgentId",
    "CodecError",
    "CommandEntry",
    "CommandKind",
    "CommandState",
    "DECODE_ERRORS",
    "EXPIRED_NOTE",
    "FileLedger",
    "Ledger",
    "LedgerAuthorizationError",
    "LedgerCursor",
    "LedgerError",
    "LedgerUnavailableError",
    "LifecycleError",
    "MalformedRecordError",
    "MemoryLedger",
    "ProcessInfo",
    "Record",
    "RecordValidationError",
    "Status",
    "StatusEntry",
    "TERMINAL_STATES",
    "TrafficCounters",
    "UnknownCommandError",
    "UnknownRecordTypeError",
    "UnknownSchemaVersionError",
    "decode_record",
    "encode_record",
    "validate_agent_id",
]
