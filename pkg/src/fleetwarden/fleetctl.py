"""`fleetctl`: admin command line against the controller API.

Subcommands: fleet, action, quarantine, scan, history, energy, and serve
(which boots the controller itself and hosts the API).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime

import httpx

DEFAULT_ENDPOINT = "http://127.0.0.1:8787"


class ApiError(Exception):
    pass


class ApiClient:
    def __init__(self, endpoint: str, token: str):
        self.endpoint = endpoint.rstrip("/")
        self.headers = {"Authorization": f"Bearer {token}"}

    def request(self, method: str, path: str, **kwargs) -> dict:
        try:
            response = httpx.request(
                method, self.endpoint + path, headers=self.headers, timeout=15.0, **kwargs
            )
        except httpx.HTTPError as exc:
            raise ApiError(f"controller unreachable at {self.endpoint}: {exc}") from exc
        try:
            doc = response.json()
        except ValueError:
            doc = {}
        if response.status_code >= 400:
            raise ApiError(doc.get("error") or doc.get("detail") or f"HTTP {response.status_code}")
        return doc


def _fmt_age(now: float, then: float | None) -> str:
    if then is None:
        return "never"
    seconds = max(0, int(now - then))
    if seconds < 120:
        return f"{seconds}s"
    if seconds < 7200:
        return f"{seconds // 60}m"
    return f"{seconds // 3600}h"


def _fmt_idle(seconds: int) -> str:
    if seconds < 60:
        return f"{seconds}s"
    return f"{seconds // 60}m{seconds % 60:02d}s"


def cmd_fleet(client: ApiClient, args) -> int:
    doc = client.request("GET", "/v1/fleet")
    fleet = doc["fleet"]
    if args.json:
        print(json.dumps(fleet, indent=2))
        return 0
    now = fleet["generated_at"]
    header = f"{'AGENT':<20} {'ADDRESS':<16} {'BADGE':<12} {'STATUS':<7} {'IDLE':<8} {'SUSP':<5} LAST-SEEN"
    print(header)
    for row in fleet["rows"]:
        latest = row["latest"]
        print(
            f"{row['machine']['agent']:<20} {row['machine']['address']:<16} "
            f"{row['badge']:<12} "
            f"{(latest['status'] if latest else '-'):<7} "
            f"{(_fmt_idle(latest['idle_seconds']) if latest else '-'):<8} "
            f"{len(row['suspicious']):<5} "
            f"{_fmt_age(now, latest['timestamp'] if latest else None)}"
        )
    return 0


def cmd_action(client: ApiClient, args) -> int:
    doc = client.request(
        "POST", f"/v1/machines/{args.agent}/actions", json={"kind": args.kind.upper()}
    )
    command = doc["command"]
    print(f"{command['command_id']} {command['kind']} -> {command['target']}: {command['state']}")
    return 0


def cmd_quarantine(client: ApiClient, args) -> int:
    on = args.state == "on"
    doc = client.request("POST", f"/v1/machines/{args.agent}/quarantine", json={"on": on})
    machine = doc["machine"]
    print(f"{machine['agent']} quarantined={machine['quarantined']}")
    return 0


def cmd_scan(client: ApiClient, args) -> int:
    doc = client.request("POST", "/v1/scan", json={"range": args.range})
    for address in doc["alive"]:
        print(address)
    print(f"{len(doc['alive'])} alive", file=sys.stderr)
    return 0


def cmd_history(client: ApiClient, args) -> int:
    params = {}
    if args.agent:
        params["agent"] = args.agent
    if args.kind:
        params["kind"] = args.kind
    if args.since is not None:
        params["since"] = args.since
    if args.until is not None:
        params["until"] = args.until
    doc = client.request("GET", "/v1/history", params=params)
    for event in doc["events"]:
        stamp = datetime.fromtimestamp(event["at"]).isoformat(timespec="seconds")
        print(f"{event['event_id']:>6} {stamp} {event['kind']:<22} {event['agent'] or '-':<20} "
              f"{json.dumps(event['payload'])}")
    return 0


def cmd_energy(client: ApiClient, args) -> int:
    params = {}
    if args.since is not None:
        params["since"] = args.since
    if args.until is not None:
        params["until"] = args.until
    if args.baseline:
        params["baseline"] = args.baseline
    doc = client.request("GET", "/v1/energy", params=params)
    energy = doc["energy"]
    if args.json:
        print(json.dumps(energy, indent=2))
        return 0
    print(f"{'AGENT':<20} {'WH':>12}")
    for agent, wh in energy["per_agent_wh"].items():
        print(f"{agent:<20} {wh:>12.1f}")
    print(f"{'TOTAL':<20} {energy['total_wh']:>12.1f}")
    if "savings" in energy:
        savings = energy["savings"]
        print(
            f"baseline {savings['baseline_wh']:.1f} Wh, actual {savings['actual_wh']:.1f} Wh, "
            f"saved {savings['saved_wh']:.1f} Wh ({savings['saved_fraction'] * 100:.1f}%)"
        )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .clock import SystemClock
    from .controller.api import RefreshLoop, create_app
    from .controller.config import (
        load_controller_config,
        load_policy_config,
        load_watchlist,
    )
    from .controller.scan import PingProber
    from .controller.service import Controller
    from .ledger.filestore import FileLedger
    from .persistence.store import FileEventStore

    config = load_controller_config(args.config)
    watchlist = load_watchlist(config.watchlist_path) if config.watchlist_path else None
    policy = load_policy_config(config.policy_path) if config.policy_path else None
    controller = Controller(
        ledger=FileLedger(config.ledger_root),
        store=FileEventStore(os.path.join(config.data_dir, "events.log")),
        clock=SystemClock(),
        policy=policy,
        watchlist=watchlist,
        windows=config.windows(),
        prober=PingProber(),
        command_expiry=config.command_expiry_seconds,
    )
    app = create_app(controller, token=config.auth_token, static_dir=config.dashboard_dir)
    loop = RefreshLoop(controller, config.refresh_period_seconds)
    loop.start()
    try:
        uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")
    finally:
        loop.stop()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fleetctl", description="fleet administration")
    parser.add_argument("--endpoint", default=os.environ.get("FLEETWARDEN_ENDPOINT", DEFAULT_ENDPOINT))
    parser.add_argument("--token", default=os.environ.get("FLEETWARDEN_AUTH_TOKEN", ""))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fleet", help="show the fleet table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fleet)

    p = sub.add_parser("action", help="issue a remote action")
    p.add_argument("agent")
    p.add_argument("kind", choices=["shutdown", "restart", "logoff", "hibernate"])
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("quarantine", help="toggle quarantine")
    p.add_argument("agent")
    p.add_argument("state", choices=["on", "off"])
    p.set_defaults(func=cmd_quarantine)

    p = sub.add_parser("scan", help="discover live addresses")
    p.add_argument("range")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("history", help="query the event history")
    p.add_argument("agent", nargs="?")
    p.add_argument("--kind")
    p.add_argument("--since", type=float)
    p.add_argument("--until", type=float)
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("energy", help="energy usage and savings report")
    p.add_argument("--since", type=float)
    p.add_argument("--until", type=float)
    p.add_argument("--baseline", choices=["always-on"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("serve", help="run the controller and its API")
    p.add_argument("--config", required=True)
    p.set_defaults(func=None)
    p.set_defaults(serve=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "serve", False):
        return cmd_serve(args)
    client = ApiClient(args.endpoint, args.token)
    try:
        return args.func(client, args)
    except ApiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
