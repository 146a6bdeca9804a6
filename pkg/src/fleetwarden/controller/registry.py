"""Machine registry: which machines belong to this fleet.

Registration is the enrollment step after discovery; the registry row
carries the network address, display class (which picks the power model),
the quarantine flag, and liveness bookkeeping. Mutations go through the
Registry so they can be persisted as fleet events by the controller.
"""

from __future__ import annotations

import ipaddress
import re
import threading
from dataclasses import dataclass, field

from ..energy.model import DisplayClass, PowerModel, model_for
from ..ledger.records import AgentId, validate_agent_id

_HOSTNAME_RE = re.compile(r"^[A-Za-z0-9]([A-Za-z0-9.-]{0,252}[A-Za-z0-9])?$")


class RegistryError(Exception):
    pass


class AlreadyRegisteredError(RegistryError):
    pass


class UnknownAgentError(RegistryError):
    pass


def validate_address(address: str) -> str:
    try:
        ipaddress.ip_address(address)
        return address
    except ValueError:
        pass
    if _HOSTNAME_RE.match(address):
        return address
    raise RegistryError(f"unparseable network address: {address!r}")


@dataclass
class MachineRecord:
    agent: AgentId
    address: str
    display_class: DisplayClass
    power_model: PowerModel
    registered_at: float
    quarantined: bool = False
    last_seen: float | None = None


class Registry:
    """Thread-safe machine table: many readers, serialized writers."""

    def __init__(self):
        self._rows: dict[AgentId, MachineRecord] = {}
        self._lock = threading.RLock()

    def register(
        self,
        agent: AgentId,
        address: str,
        display_class: DisplayClass | str,
        now: float,
        power_model: PowerModel | None = None,
    ) -> MachineRecord:
        validate_agent_id(agent)
        validate_address(address)
        display = DisplayClass(display_class)
        with self._lock:
            if agent in self._rows:
                raise AlreadyRegisteredError(f"{agent!r} already registered")
            record = MachineRecord(
                agent=agent,
                address=address,
                display_class=display,
                power_model=power_model or model_for(display),
                registered_at=now,
            )
            self._rows[agent] = record
            return record

    def set_quarantine(self, agent: AgentId, on: bool) -> MachineRecord:
        with self._lock:
            record = self._rows.get(agent)
            if record is None:
                raise UnknownAgentError(f"unknown agent {agent!r}")
            record.quarantined = bool(on)
            return record

    def touch(self, agent: AgentId, seen_at: float) -> None:
        with self._lock:
            record = self._rows.get(agent)
            if record is not None and (record.last_seen is None or seen_at > record.last_seen):
                record.last_seen = seen_at

    def get(self, agent: AgentId) -> MachineRecord:
        with self._lock:
            record = self._rows.get(agent)
            if record is None:
                raise UnknownAgentError(f"unknown agent {agent!r}")
            return record

    def contains(self, agent: AgentId) -> bool:
        with self._lock:
            return agent in self._rows

    def rows(self) -> list[MachineRecord]:
        with self._lock:
            return sorted(self._rows.values(), key=lambda r: r.agent)

    def __len__(self) -> int:
        with self._lock:
            return len(self._rows)
