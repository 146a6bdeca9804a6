"""HTTP surface of the controller.

Two route families share one app and one bearer token: `/v1/ledger/*`
hosts the ledger for HTTP-mode agents (bodies wrap the same line-record
payloads used on disk), and the rest is the admin API consumed by
`fleetctl` and the dashboard. Every response carries an explicit schema
version. The dashboard's static assets, when built, are served from `/`.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any

from fastapi import Body, Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..ledger.base import (
    LedgerAuthorizationError,
    LedgerError,
    LifecycleError,
    UnknownCommandError,
)
from ..ledger.codec import decode_record, encode_record
from ..ledger.records import (
    CommandEntry,
    CommandKind,
    CommandState,
    RecordValidationError,
    StatusEntry,
)
from ..ledger.codec import CodecError
from ..persistence.events import EventKind, FleetEvent
from .fleetview import FleetRow, FleetView
from .registry import AlreadyRegisteredError, MachineRecord, RegistryError, UnknownAgentError
from .scan import ScanError
from .service import Controller

API_VERSION = 1


def entry_to_dict(entry: StatusEntry) -> dict[str, Any]:
    return {
        "agent": entry.agent,
        "seq": entry.seq,
        "timestamp": entry.timestamp,
        "status": entry.status.value,
        "idle_seconds": entry.idle_seconds,
        "processes": [
            {"name": p.name, "pid": p.pid, "memory_kb": p.memory_kb} for p in entry.processes
        ],
        "traffic": {
            "rx_bytes": entry.traffic.rx_bytes,
            "tx_bytes": entry.traffic.tx_bytes,
            "rx_packets": entry.traffic.rx_packets,
            "tx_packets": entry.traffic.tx_packets,
        },
        "degraded": entry.degraded,
        "traffic_reset": entry.traffic_reset,
    }


def command_to_dict(command: CommandEntry) -> dict[str, Any]:
    return {
        "command_id": command.command_id,
        "target": command.target,
        "kind": command.kind.value,
        "issued_at": command.issued_at,
        "expires_at": command.expires_at,
        "state": command.state.value,
        "result_note": command.result_note,
    }


def machine_to_dict(record: MachineRecord) -> dict[str, Any]:
    return {
        "agent": record.agent,
        "address": record.address,
        "display_class": record.display_class.value,
        "quarantined": record.quarantined,
        "last_seen": record.last_seen,
        "registered_at": record.registered_at,
    }


def row_to_dict(row: FleetRow) -> dict[str, Any]:
    return {
        "machine": machine_to_dict(row.machine),
        "latest": entry_to_dict(row.latest) if row.latest else None,
        "liveness": row.liveness.value,
        "badge": row.badge,
        "suspicious": list(row.suspicious),
        "booted_at": row.booted_at,
    }


def view_to_dict(view: FleetView) -> dict[str, Any]:
    return {
        "generated_at": view.generated_at,
        "rows": [row_to_dict(row) for row in view.rows],
    }


def event_to_dict(event: FleetEvent) -> dict[str, Any]:
    return {
        "event_id": event.event_id,
        "at": event.at,
        "kind": event.kind.value,
        "agent": event.agent,
        "payload": event.payload,
    }


def _ok(**fields: Any) -> dict[str, Any]:
    return {"v": API_VERSION, **fields}


def create_app(
    controller: Controller,
    token: str,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="fleetwarden controller", version="0.1.0")

    def require_token(request: Request) -> None:
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    authed = [Depends(require_token)]

    @app.exception_handler(RegistryError)
    async def registry_error(request: Request, exc: RegistryError):
        status = 404 if isinstance(exc, UnknownAgentError) else 409 if isinstance(exc, AlreadyRegisteredError) else 400
        return JSONResponse(status_code=status, content=_ok(error=str(exc)))

    @app.exception_handler(LedgerError)
    async def ledger_error(request: Request, exc: LedgerError):
        status = 404 if isinstance(exc, UnknownCommandError) else 409 if isinstance(exc, LifecycleError) else 403 if isinstance(exc, LedgerAuthorizationError) else 503
        return JSONResponse(status_code=status, content=_ok(error=str(exc)))

    @app.exception_handler(ScanError)
    async def scan_error(request: Request, exc: ScanError):
        return JSONResponse(status_code=400, content=_ok(error=str(exc)))

    # -- ledger transport (HTTP mode agents)

    def _decode_body_record(payload: dict) -> StatusEntry | CommandEntry:
        raw = payload.get("record")
        if not isinstance(raw, str):
            raise HTTPException(status_code=422, detail="body must carry a 'record' line")
        try:
            return decode_record(raw)
        except (CodecError, RecordValidationError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/v1/ledger/status", dependencies=authed)
    def ledger_post_status(payload: dict = Body(...)):
        record = _decode_body_record(payload)
        if not isinstance(record, StatusEntry):
            raise HTTPException(status_code=422, detail="expected a status record")
        position = controller.ledger.append(record)
        return _ok(position=position)

    @app.get("/v1/ledger/status/latest", dependencies=authed)
    def ledger_latest():
        latest = controller.ledger.read_latest_per_agent()
        lines = [encode_record(latest[agent]).decode("utf-8").rstrip("\n") for agent in sorted(latest)]
        return _ok(records=lines)

    @app.post("/v1/ledger/commands", dependencies=authed)
    def ledger_post_command(payload: dict = Body(...)):
        record = _decode_body_record(payload)
        if not isinstance(record, CommandEntry) or record.state is not CommandState.PENDING:
            raise HTTPException(status_code=422, detail="expected a pending command record")
        position = controller.ledger.append(record)
        return _ok(position=position)

    @app.get("/v1/ledger/commands/pending", dependencies=authed)
    def ledger_pending(agent: str = Query(...)):
        pending = controller.ledger.read_pending_commands(agent, controller.clock.now())
        lines = [encode_record(c).decode("utf-8").rstrip("\n") for c in pending]
        return _ok(records=lines)

    @app.post("/v1/ledger/commands/{command_id}/transition", dependencies=authed)
    def ledger_transition(command_id: str, payload: dict = Body(...)):
        try:
            state = CommandState(str(payload.get("state", "")))
        except ValueError:
            raise HTTPException(status_code=422, detail="bad target state")
        note = payload.get("result_note")
        updated = controller.ledger.transition_command(command_id, state, note)
        return _ok(record=encode_record(updated).decode("utf-8").rstrip("\n"))

    # -- admin API

    @app.get("/v1/fleet", dependencies=authed)
    def get_fleet():
        return _ok(fleet=view_to_dict(controller.fleet_view()))

    @app.get("/v1/machines/{agent}", dependencies=authed)
    def get_machine(agent: str):
        detail = controller.machine_detail(agent)
        return _ok(
            machine=machine_to_dict(detail["machine"]),
            latest=entry_to_dict(detail["latest"]) if detail["latest"] else None,
            liveness=detail["liveness"].value if detail["liveness"] else None,
            suspicious=list(detail["suspicious"]),
            commands=[command_to_dict(c) for c in detail["commands"]],
        )

    @app.post("/v1/machines", dependencies=authed)
    def post_machine(payload: dict = Body(...)):
        record = controller.register_machine(
            agent=str(payload.get("agent", "")),
            address=str(payload.get("address", "")),
            display_class=str(payload.get("display_class", "OTHER")),
        )
        return _ok(machine=machine_to_dict(record))

    @app.post("/v1/machines/{agent}/actions", dependencies=authed)
    def post_action(agent: str, payload: dict = Body(...)):
        try:
            kind = CommandKind(str(payload.get("kind", "")).upper())
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown action kind {payload.get('kind')!r}")
        command = controller.issue_action(agent, kind)
        return _ok(command=command_to_dict(command))

    @app.post("/v1/machines/{agent}/quarantine", dependencies=authed)
    def post_quarantine(agent: str, payload: dict = Body(...)):
        record = controller.quarantine(agent, bool(payload.get("on", False)))
        return _ok(machine=machine_to_dict(record))

    @app.post("/v1/scan", dependencies=authed)
    def post_scan(payload: dict = Body(...)):
        alive = controller.scan(str(payload.get("range", "")))
        return _ok(alive=alive)

    @app.get("/v1/commands/{command_id}", dependencies=authed)
    def get_command(command_id: str):
        command = controller.command(command_id)
        if command is None:
            raise HTTPException(status_code=404, detail=f"unknown command {command_id!r}")
        return _ok(command=command_to_dict(command))

    @app.get("/v1/history", dependencies=authed)
    def get_history(
        agent: str | None = None,
        kind: str | None = None,
        since: float | None = None,
        until: float | None = None,
    ):
        kind_enum = None
        if kind:
            try:
                kind_enum = EventKind(kind.upper())
            except ValueError:
                raise HTTPException(status_code=422, detail=f"unknown event kind {kind!r}")
        events = controller.history(agent=agent, kind=kind_enum, since=since, until=until)
        return _ok(events=[event_to_dict(e) for e in events])

    @app.get("/v1/energy", dependencies=authed)
    def get_energy(
        since: float | None = None,
        until: float | None = None,
        baseline: str | None = None,
    ):
        breakdown, savings = controller.energy_report(since=since, until=until, baseline=baseline)
        body: dict[str, Any] = {
            "per_agent_wh": {k: round(v, 6) for k, v in sorted(breakdown.per_agent_wh.items())},
            "total_wh": round(breakdown.total_wh, 6),
        }
        if savings is not None:
            body["savings"] = {
                "baseline_wh": round(savings.baseline_wh, 6),
                "actual_wh": round(savings.actual_wh, 6),
                "saved_wh": round(savings.saved_wh, 6),
                "saved_fraction": round(savings.saved_fraction, 6),
            }
        return _ok(energy=body)

    @app.post("/v1/refresh", dependencies=authed)
    def post_refresh():
        report = controller.refresh()
        return _ok(
            heartbeats=report.heartbeats,
            transitions=report.transitions,
            expired=report.expired,
            policy_issued=[[a, k.value] for a, k in report.policy_issued],
        )

    if static_dir is not None and Path(static_dir).is_dir():
        static_path = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_path / "index.html")

        app.mount("/assets", StaticFiles(directory=static_path), name="assets")

    return app


class RefreshLoop:
    """Background thread calling controller.refresh() on a fixed period."""

    def __init__(self, controller: Controller, period_seconds: float = 5.0):
        self.controller = controller
        self.period = period_seconds
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, name="refresh", daemon=True)
        self._thread.start()

    def _loop(self) -> None:
        while not self._stop.wait(self.period):
            try:
                self.controller.refresh()
            except Exception:
                pass  # a failed pass must not kill the loop; next one retries

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
