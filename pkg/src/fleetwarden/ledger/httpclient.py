"""HTTP-mode ledger client.

Speaks to the controller-hosted ledger endpoints; bodies wrap the same
line-record encoding used by the shared-directory transport. This client
covers the agent-facing operations (append, latest, pending, transition);
cursor and full-history reads stay with the controller, which owns the
backing ledger locally.
"""

from __future__ import annotations

import httpx

from .base import (
    Ledger,
    LedgerCursor,
    LedgerError,
    LedgerUnavailableError,
    LifecycleError,
    UnknownCommandError,
)
from .codec import decode_record, encode_record
from .records import AgentId, CommandEntry, CommandState, Record, StatusEntry


class HttpLedger(Ledger):
    def __init__(
        self,
        endpoint: str,
        token: str = "",
        author: AgentId | None = None,
        client: httpx.Client | None = None,
        timeout: float = 10.0,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.author = author
        self._client = client or httpx.Client(timeout=timeout)
        self._headers = {"Authorization": f"Bearer {token}"}

    def _request(self, method: str, path: str, **kwargs) -> dict:
        try:
            response = self._client.request(
                method, self.endpoint + path, headers=self._headers, **kwargs
            )
        except httpx.HTTPError as exc:
            raise LedgerUnavailableError(f"ledger endpoint unreachable: {exc}") from exc
        if response.status_code == 404:
            raise UnknownCommandError(self._error_of(response))
        if response.status_code == 409:
            raise LifecycleError(self._error_of(response))
        if response.status_code >= 500:
            raise LedgerUnavailableError(self._error_of(response))
        if response.status_code >= 400:
            raise LedgerError(self._error_of(response))
        return response.json()

    @staticmethod
    def _error_of(response: httpx.Response) -> str:
        try:
            doc = response.json()
            return str(doc.get("error") or doc.get("detail") or response.text)
        except ValueError:
            return response.text

    def append(self, record: Record) -> int:
        record.validate()
        line = encode_record(record).decode("utf-8").rstrip("\n")
        if isinstance(record, StatusEntry):
            path = "/v1/ledger/status"
        else:
            path = "/v1/ledger/commands"
        doc = self._request("POST", path, json={"v": 1, "record": line})
        return int(doc.get("position", -1))

    def read_latest_per_agent(self) -> dict[AgentId, StatusEntry]:
        doc = self._request("GET", "/v1/ledger/status/latest")
        out: dict[AgentId, StatusEntry] = {}
        for line in doc.get("records", []):
            record = decode_record(line)
            if isinstance(record, StatusEntry):
                out[record.agent] = record
        return out

    def read_pending_commands(self, target: AgentId, now: float) -> list[CommandEntry]:
        # Expiry is judged by the server's clock; `now` is advisory here.
        doc = self._request("GET", "/v1/ledger/commands/pending", params={"agent": target})
        out = []
        for line in doc.get("records", []):
            record = decode_record(line)
            if isinstance(record, CommandEntry):
                out.append(record)
        return out

    def transition_command(
        self, command_id: str, new_state: CommandState, result_note: str | None = None
    ) -> CommandEntry:
        doc = self._request(
            "POST",
            f"/v1/ledger/commands/{command_id}/transition",
            json={"v": 1, "state": new_state.value, "result_note": result_note},
        )
        record = decode_record(doc["record"])
        assert isinstance(record, CommandEntry)
        return record

    # Full-history reads belong to the ledger owner (the controller).

    def read_status_history(self, agent: AgentId | None = None) -> list[StatusEntry]:
        raise LedgerError("status history is not exposed over the HTTP transport")

    def read_commands(self) -> list[CommandEntry]:
        raise LedgerError("command history is not exposed over the HTTP transport")

    def read_new(self, cursor: LedgerCursor | None = None) -> tuple[list[Record], LedgerCursor]:
        raise LedgerError("cursor reads are not exposed over the HTTP transport")

    @property
    def malformed_count(self) -> int:
        return 0

    def close(self) -> None:
        self._client.close()
