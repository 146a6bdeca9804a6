"""Controller configuration: one YAML file plus watchlist and policy files."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..ledger.records import CommandKind
from ..policy.engine import PolicyConfig
from ..policy.schedule import parse_schedule
from .fleetview import StalenessWindows, Watchlist


class ControllerConfigError(ValueError):
    pass


@dataclass
class ControllerConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8787
    auth_token: str = ""
    ledger_mode: str = "file"
    ledger_root: str = "./ledger"
    data_dir: str = "./controller-state"
    watchlist_path: str | None = None
    policy_path: str | None = None
    heartbeat_period_seconds: float = 30.0
    stale_multiplier: float = 3.0
    offline_multiplier: float = 10.0
    refresh_period_seconds: float = 5.0
    command_expiry_seconds: float = 300.0
    dashboard_dir: str | None = None

    def windows(self) -> StalenessWindows:
        return StalenessWindows(
            stale_after=self.heartbeat_period_seconds * self.stale_multiplier,
            offline_after=self.heartbeat_period_seconds * self.offline_multiplier,
        )


def load_controller_config(path: str | os.PathLike) -> ControllerConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ControllerConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ControllerConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ControllerConfigError("config root must be a mapping")
    listen = data.get("listen") or {}
    ledger = data.get("ledger") or {}
    staleness = data.get("staleness") or {}
    try:
        return ControllerConfig(
            listen_host=str(listen.get("host", "127.0.0.1")),
            listen_port=int(listen.get("port", 8787)),
            auth_token=str(data.get("auth_token", "")),
            ledger_mode=str(ledger.get("mode", "file")),
            ledger_root=str(ledger.get("root", "./ledger")),
            data_dir=str(data.get("data_dir", "./controller-state")),
            watchlist_path=data.get("watchlist_path"),
            policy_path=data.get("policy_path"),
            heartbeat_period_seconds=float(staleness.get("heartbeat_period_seconds", 30.0)),
            stale_multiplier=float(staleness.get("stale_multiplier", 3.0)),
            offline_multiplier=float(staleness.get("offline_multiplier", 10.0)),
            refresh_period_seconds=float(data.get("refresh_period_seconds", 5.0)),
            command_expiry_seconds=float(data.get("command_expiry_seconds", 300.0)),
            dashboard_dir=data.get("dashboard_dir"),
        )
    except (TypeError, ValueError) as exc:
        raise ControllerConfigError(str(exc)) from exc


def load_watchlist(path: str | os.PathLike) -> Watchlist:
    try:
        return Watchlist.from_text(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ControllerConfigError(f"cannot read watchlist {path}: {exc}") from exc


def load_policy_config(path: str | os.PathLike) -> PolicyConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ControllerConfigError(f"cannot read policy config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ControllerConfigError(f"cannot parse policy config {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ControllerConfigError("policy config root must be a mapping")
    return policy_from_mapping(data)


def policy_from_mapping(data: Mapping[str, Any]) -> PolicyConfig:
    config = PolicyConfig()
    if "idle_threshold_seconds" in data:
        config.idle_threshold_seconds = int(data["idle_threshold_seconds"])
    if "idle_action" in data:
        config.idle_action = CommandKind(str(data["idle_action"]).upper())
    if "after_hours_action" in data:
        config.after_hours_action = CommandKind(str(data["after_hours_action"]).upper())
    if "work_hours" in data:
        config.work_hours = parse_schedule(str(data["work_hours"]))
    if "grace_after_boot_seconds" in data:
        config.grace_after_boot_seconds = int(data["grace_after_boot_seconds"])
    if "enabled" in data:
        config.enabled = bool(data["enabled"])
    if "timezone" in data and data["timezone"]:
        config.timezone = str(data["timezone"])
    return config.validate()
