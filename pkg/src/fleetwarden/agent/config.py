"""Agent configuration: YAML file, overridable via FLEETWARDEN_* env vars."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..ledger.records import RecordValidationError, validate_agent_id

ENV_PREFIX = "FLEETWARDEN_"

MIN_IDLE_THRESHOLD = 60


class ConfigError(ValueError):
    pass


@dataclass
class LedgerConfig:
    mode: str = "file"  # "file" | "http"
    root: str = "./ledger"
    endpoint: str = "http://127.0.0.1:8787"


@dataclass
class AgentConfig:
    agent_id: str
    idle_threshold_seconds: int = 600
    heartbeat_period_seconds: int = 30
    command_poll_period_seconds: int = 5
    ledger: LedgerConfig = field(default_factory=LedgerConfig)
    auth_token: str = ""
    state_dir: str = "./agent-state"
    input_watch: list[str] = field(default_factory=list)

    def validate(self) -> "AgentConfig":
        try:
            validate_agent_id(self.agent_id)
        except RecordValidationError as exc:
            raise ConfigError(str(exc)) from exc
        if self.idle_threshold_seconds < MIN_IDLE_THRESHOLD:
            raise ConfigError(f"idle_threshold_seconds must be >= {MIN_IDLE_THRESHOLD}")
        if self.heartbeat_period_seconds < 1 or self.command_poll_period_seconds < 1:
            raise ConfigError("periods must be >= 1 second")
        if self.ledger.mode not in ("file", "http"):
            raise ConfigError(f"unknown ledger mode {self.ledger.mode!r}")
        return self


_ENV_KEYS = {
    "AGENT_ID": ("agent_id", str),
    "IDLE_THRESHOLD_SECONDS": ("idle_threshold_seconds", int),
    "HEARTBEAT_PERIOD_SECONDS": ("heartbeat_period_seconds", int),
    "COMMAND_POLL_PERIOD_SECONDS": ("command_poll_period_seconds", int),
    "AUTH_TOKEN": ("auth_token", str),
    "STATE_DIR": ("state_dir", str),
    "LEDGER_MODE": ("ledger.mode", str),
    "LEDGER_ROOT": ("ledger.root", str),
    "LEDGER_ENDPOINT": ("ledger.endpoint", str),
}


def agent_config_from_mapping(data: Mapping[str, Any]) -> AgentConfig:
    ledger_raw = data.get("ledger") or {}
    if not isinstance(ledger_raw, Mapping):
        raise ConfigError("ledger section must be a mapping")
    ledger = LedgerConfig(
        mode=str(ledger_raw.get("mode", "file")),
        root=str(ledger_raw.get("root", "./ledger")),
        endpoint=str(ledger_raw.get("endpoint", "http://127.0.0.1:8787")),
    )
    try:
        config = AgentConfig(
            agent_id=str(data["agent_id"]),
            idle_threshold_seconds=int(data.get("idle_threshold_seconds", 600)),
            heartbeat_period_seconds=int(data.get("heartbeat_period_seconds", 30)),
            command_poll_period_seconds=int(data.get("command_poll_period_seconds", 5)),
            ledger=ledger,
            auth_token=str(data.get("auth_token", "")),
            state_dir=str(data.get("state_dir", "./agent-state")),
            input_watch=list(data.get("input_watch", [])),
        )
    except KeyError as exc:
        raise ConfigError(f"missing required key: {exc.args[0]}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return config


def apply_env_overrides(config: AgentConfig, environ: Mapping[str, str] | None = None) -> AgentConfig:
    env = os.environ if environ is None else environ
    for suffix, (dotted, cast) in _ENV_KEYS.items():
        raw = env.get(ENV_PREFIX + suffix)
        if raw is None:
            continue
        try:
            value = cast(raw)
        except ValueError as exc:
            raise ConfigError(f"bad env override {ENV_PREFIX + suffix}={raw!r}") from exc
        if "." in dotted:
            section, attr = dotted.split(".")
            setattr(getattr(config, section), attr, value)
        else:
            setattr(config, dotted, value)
    return config


def load_agent_config(path: str | os.PathLike, environ: Mapping[str, str] | None = None) -> AgentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a mapping")
    config = agent_config_from_mapping(data)
    apply_env_overrides(config, environ)
    return config.validate()
