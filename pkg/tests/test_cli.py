import json
import socket
import threading
import time

import httpx
import pytest
import uvicorn
import yaml

from fleetwarden.agent.cli import main as agent_main
from fleetwarden.fleetctl import main as fleetctl_main
from fleetwarden.sim.cli import main as fleetsim_main

TOKEN = "cli-test-token"


@pytest.fixture
def agent_config(tmp_path):
    path = tmp_path / "agent.yaml"
    path.write_text(
        yaml.safe_dump(
            {
                "agent_id": "cli-pc01",
                "idle_threshold_seconds": 600,
                "heartbeat_period_seconds": 30,
                "command_poll_period_seconds": 5,
                "ledger": {"mode": "file", "root": str(tmp_path / "ledger")},
                "state_dir": str(tmp_path / "state"),
            }
        )
    )
    return path


class TestAgentCli:
    def test_id(self, agent_config, capsys):
        assert agent_main(["id", "--config", str(agent_config)]) == 0
        assert capsys.readouterr().out.strip() == "cli-pc01"

    def test_env_override(self, agent_config, capsys, monkeypatch):
        monkeypatch.setenv("FLEETWARDEN_AGENT_ID", "overridden")
        assert agent_main(["id", "--config", str(agent_config)]) == 0
        assert capsys.readouterr().out.strip() == "overridden"

    def test_simulate_trace(self, tmp_path, capsys):
        trace = tmp_path / "day.trace"
        trace.write_text("0 input\n100 input\n0 proc editor 12\n50 traffic 1000 200\n")
        rc = agent_main(
            ["simulate", "--trace", str(trace), "--agent-id", "sim-pc", "--duration", "800"]
        )
        assert rc == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.strip().splitlines()]
        assert len(lines) == 27  # 800 / 30 + 1 ticks
        assert lines[0]["agent"] == "sim-pc"
        assert lines[0]["status"] == "BUSY"
        # input stops at t=100; first IDLE heartbeat is the first tick >= 700
        first_idle = next(l for l in lines if l["status"] == "IDLE")
        assert first_idle["ts"] == 720.0
        assert first_idle["idle_seconds"] == 620

    def test_simulate_bad_trace(self, tmp_path, capsys):
        trace = tmp_path / "bad.trace"
        trace.write_text("0 frobnicate\n")
        assert agent_main(["simulate", "--trace", str(trace)]) == 1


class TestFleetsimCli:
    def test_run_seq7_scenario_file(self, capsys):
        rc = fleetsim_main(["run", "scenarios/seq7.yaml"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out

    def test_run_builtin(self, capsys):
        assert fleetsim_main(["run", "builtin:fleet180"]) == 0

    def test_trace_out(self, tmp_path, capsys):
        out_path = tmp_path / "trace.txt"
        rc = fleetsim_main(["run", "scenarios/demo.yaml", "--trace-out", str(out_path)])
        assert rc == 0
        content = out_path.read_text()
        assert content.startswith("TRACE demo")
        assert "STEP" in content and "RECORD" in content

    def test_missing_scenario(self, capsys):
        assert fleetsim_main(["run", "no-such.yaml"]) == 2


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    from fleetwarden.clock import SystemClock
    from fleetwarden.controller import Controller, FixtureProber, Watchlist
    from fleetwarden.controller.api import create_app
    from fleetwarden.ledger import FileLedger
    from fleetwarden.persistence import FileEventStore

    tmp = tmp_path_factory.mktemp("server")
    controller = Controller(
        ledger=FileLedger(tmp / "ledger"),
        store=FileEventStore(tmp / "events.log"),
        clock=SystemClock(),
        watchlist=Watchlist.of(["evil*"]),
        prober=FixtureProber(alive={"10.0.0.1"}),
    )
    app = create_app(controller, token=TOKEN)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}", controller
    server.should_exit = True
    thread.join(timeout=5)


class TestFleetctl:
    def test_fleet_roundtrip(self, live_server, capsys):
        endpoint, controller = live_server
        base = ["--endpoint", endpoint, "--token", TOKEN]
        rc = fleetctl_main(base + ["fleet"])
        assert rc == 0
        assert "AGENT" in capsys.readouterr().out

        rc = fleetctl_main(base + ["scan", "10.0.0.1-3"])
        assert rc == 0
        assert "10.0.0.1" in capsys.readouterr().out

        controller.register_machine("cli-pc01", "10.0.0.1", "LCD")
        rc = fleetctl_main(base + ["action", "cli-pc01", "restart"])
        assert rc == 0
        assert "RESTART" in capsys.readouterr().out

        rc = fleetctl_main(base + ["quarantine", "cli-pc01", "on"])
        assert rc == 0
        assert "quarantined=True" in capsys.readouterr().out

        rc = fleetctl_main(base + ["history", "cli-pc01"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "REGISTERED" in out and "QUARANTINE_CHANGED" in out

        rc = fleetctl_main(base + ["energy", "--json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert "total_wh" in doc

        rc = fleetctl_main(base + ["fleet", "--json"])
        assert rc == 0
        fleet = json.loads(capsys.readouterr().out)
        assert fleet["rows"][0]["badge"] == "QUARANTINED"

    def test_bad_token_fails(self, live_server, capsys):
        endpoint, _ = live_server
        rc = fleetctl_main(["--endpoint", endpoint, "--token", "wrong", "fleet"])
        assert rc == 1
        assert "error" in capsys.readouterr().err
