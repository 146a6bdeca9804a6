"""Network discovery: which addresses answer a probe.

Discovery only pre-fills registration; enrollment is a separate step since
an agent id exists only once the agent is installed. The prober is
pluggable: a real echo probe for deployments, a fixture for tests and
simulation. Probe timeouts mean dead, never error.
"""

from __future__ import annotations

import ipaddress
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Protocol


class ScanError(ValueError):
    pass


class Prober(Protocol):
    def probe(self, address: str) -> bool: ...


class PingProber:
    """ICMP echo via the system ping binary; timeout or failure = dead."""

    def __init__(self, timeout_seconds: float = 1.0):
        self.timeout = timeout_seconds

    def probe(self, address: str) -> bool:
        if sys.platform.startswith("win"):
            argv = ["ping", "-n", "1", "-w", str(int(self.timeout * 1000)), address]
        else:
            argv = ["ping", "-c", "1", "-W", str(max(1, int(self.timeout))), address]
        try:
            result = subprocess.run(
                argv,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
                timeout=self.timeout + 1,
            )
        except (OSError, subprocess.TimeoutExpired):
            return False
        return result.returncode == 0


class FixtureProber:
    def __init__(self, alive: Iterable[str]):
        self.alive = set(alive)
        self.probed: list[str] = []

    def probe(self, address: str) -> bool:
        self.probed.append(address)
        return address in self.alive


def parse_address_range(address_range: str) -> list[str]:
    """CIDR ('10.0.0.0/28'), dash range ('10.0.0.1-20'), or a single address."""
    text = address_range.strip()
    if not text:
        raise ScanError("empty address range")
    if "/" in text:
        try:
            network = ipaddress.ip_network(text, strict=False)
        except ValueError as exc:
            raise ScanError(f"bad CIDR {text!r}: {exc}") from exc
        hosts = list(network.hosts()) or [network.network_address]
        return [str(ip) for ip in hosts]
    if "-" in text:
        base, _, tail = text.rpartition("-")
        try:
            start_ip = ipaddress.IPv4Address(base)
            last_octet = int(tail)
        except ValueError as exc:
            raise ScanError(f"bad range {text!r}: {exc}") from exc
        start_octets = str(start_ip).split(".")
        start_num = int(start_octets[3])
        if not start_num <= last_octet <= 255:
            raise ScanError(f"bad range {text!r}: end octet out of order")
        prefix = ".".join(start_octets[:3])
        return [f"{prefix}.{i}" for i in range(start_num, last_octet + 1)]
    try:
        ipaddress.ip_address(text)
    except ValueError as exc:
        raise ScanError(f"bad address {text!r}: {exc}") from exc
    return [text]


def scan_network(
    address_range: str | list[str], prober: Prober, max_workers: int = 32
) -> list[str]:
    """Addresses in the range that answered, sorted; deterministic per prober."""
    if isinstance(address_range, list):
        addresses = list(address_range)
    else:
        addresses = parse_address_range(address_range)
    if not addresses:
        return []
    with ThreadPoolExecutor(max_workers=min(max_workers, max(1, len(addresses)))) as pool:
        results = list(pool.map(prober.probe, addresses))
    alive = [addr for addr, ok in zip(addresses, results) if ok]
    return sorted(alive, key=ipaddress.ip_address)
