from .fleetview import (
    AckStatus,
    FleetRow,
    FleetView,
    Liveness,
    StalenessWindows,
    Watchlist,
    build_fleet_view,
    confirm_acknowledgement,
    detect_suspicious,
)
from .registry import (
    AlreadyRegisteredError,
    MachineRecord,
    Registry,
    RegistryError,
    UnknownAgentError,
    validate_address,
)
from .scan import FixtureProber, PingProber, Prober, ScanError, parse_address_range, scan_network
from .service import Controller, RefreshReport

__all__ = [
    "AckStatus",
    "AlreadyRegisteredError",
    "Controller",
    "FixtureProber",
    "FleetRow",
    "FleetView",
    "Liveness",
    "MachineRecord",
    "PingProber",
    "Prober",
    "RefreshReport",
    "Registry",
    "RegistryError",
    "ScanError",
    "StalenessWindows",
    "UnknownAgentError",
    "Watchlist",
    "build_fleet_view",
    "confirm_acknowledgement",
    "detect_suspicious",
    "parse_address_range",
    "scan_network",
    "validate_address",
]
