"""Power and session actions behind a platform abstraction.

The real backend shells out to the OS (Linux here; one real backend is
enough, everything else runs against the simulated one). The simulated
backend records each invocation exactly once and models the machine-level
consequence: shutdown and hibernate halt the agent loop, restart resets it.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass, field

from ..ledger.records import CommandKind


@dataclass(frozen=True)
class ActionOutcome:
    ok: bool
    detail: str = ""


class PlatformAction:
    def shutdown(self) -> ActionOutcome:
        raise NotImplementedError

    def restart(self) -> ActionOutcome:
        raise NotImplementedError

    def logoff(self) -> ActionOutcome:
        raise NotImplementedError

    def hibernate(self) -> ActionOutcome:
        raise NotImplementedError

    def invoke(self, kind: CommandKind) -> ActionOutcome:
        return {
            CommandKind.SHUTDOWN: self.shutdown,
            CommandKind.RESTART: self.restart,
            CommandKind.LOGOFF: self.logoff,
            CommandKind.HIBERNATE: self.hibernate,
        }[kind]()


LINUX_COMMANDS: dict[CommandKind, list[str]] = {
    CommandKind.SHUTDOWN: ["systemctl", "poweroff"],
    CommandKind.RESTART: ["systemctl", "reboot"],
    CommandKind.LOGOFF: ["loginctl", "terminate-user", ""],
    CommandKind.HIBERNATE: ["systemctl", "hibernate"],
}


class LinuxPlatform(PlatformAction):
    """Real backend: invokes systemd power management.

    `dry_run=True` reports the command it would run without executing it;
    tests never execute the real thing.
    """

    def __init__(self, dry_run: bool = False, user: str = ""):
        self.dry_run = dry_run
        self.user = user

    def _run(self, kind: CommandKind) -> ActionOutcome:
        argv = list(LINUX_COMMANDS[kind])
        if kind is CommandKind.LOGOFF:
            argv[-1] = self.user
        if self.dry_run:
            return ActionOutcome(ok=True, detail=f"dry-run: {' '.join(argv)}")
        try:
            result = subprocess.run(argv, capture_output=True, text=True, timeout=30)
        except (OSError, subprocess.TimeoutExpired) as exc:
            return ActionOutcome(ok=False, detail=str(exc))
        if result.returncode != 0:
            return ActionOutcome(ok=False, detail=result.stderr.strip() or f"exit {result.returncode}")
        return ActionOutcome(ok=True, detail=" ".join(argv))

    def shutdown(self) -> ActionOutcome:
        return self._run(CommandKind.SHUTDOWN)

    def restart(self) -> ActionOutcome:
        return self._run(CommandKind.RESTART)

    def logoff(self) -> ActionOutcome:
        return self._run(CommandKind.LOGOFF)

    def hibernate(self) -> ActionOutcome:
        return self._run(CommandKind.HIBERNATE)


@dataclass
class SimulatedPlatform:
    """Records every invocation; optionally fails selected kinds."""

    invocations: list[CommandKind] = field(default_factory=list)
    fail_kinds: set[CommandKind] = field(default_factory=set)

    def _invoke(self, kind: CommandKind) -> ActionOutcome:
        self.invocations.append(kind)
        if kind in self.fail_kinds:
            return ActionOutcome(ok=False, detail=f"simulated {kind.value} failure")
        return ActionOutcome(ok=True, detail=f"simulated {kind.value}")

    def shutdown(self) -> ActionOutcome:
        return self._invoke(CommandKind.SHUTDOWN)

    def restart(self) -> ActionOutcome:
        return self._invoke(CommandKind.RESTART)

    def logoff(self) -> ActionOutcome:
        return self._invoke(CommandKind.LOGOFF)

    def hibernate(self) -> ActionOutcome:
        return self._invoke(CommandKind.HIBERNATE)

    def invoke(self, kind: CommandKind) -> ActionOutcome:
        return self._invoke(kind)

    def count(self, kind: CommandKind | None = None) -> int:
        if kind is None:
            return len(self.invocations)
        return sum(1 for k in self.invocations if k is kind)
