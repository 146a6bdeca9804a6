// A scripted in-memory controller implementing the API contract the
// dashboard consumes, for headless store/render tests. The e2e test
// talks to the real controller instead.

import type { Command, CommandKind, FleetRow, FleetView, Liveness } from "../src/types.js";

let commandCounter = 0;

export function makeRow(
  agent: string,
  overrides: Partial<{
    liveness: Liveness;
    quarantined: boolean;
    status: "BUSY" | "IDLE";
    idle: number;
    suspicious: string[];
    rx: number;
    tx: number;
    timestamp: number;
  }> = {},
): FleetRow {
  const liveness = overrides.liveness ?? "ACTIVE";
  const quarantined = overrides.quarantined ?? false;
  return {
    machine: {
      agent,
      address: "10.0.0.1",
      display_class: "LCD",
      quarantined,
      last_seen: overrides.timestamp ?? 100,
      registered_at: 0,
    },
    latest: {
      agent,
      seq: 1,
      timestamp: overrides.timestamp ?? 100,
      status: overrides.status ?? "BUSY",
      idle_seconds: overrides.idle ?? 0,
      processes: [
        { name: "browser", pid: 11, memory_kb: 2048 },
        { name: "editor", pid: 12, memory_kb: 1024 },
      ],
      traffic: {
        rx_bytes: overrides.rx ?? 1000,
        tx_bytes: overrides.tx ?? 500,
        rx_packets: 10,
        tx_packets: 5,
      },
      degraded: false,
      traffic_reset: false,
    },
    liveness,
    badge: quarantined ? "QUARANTINED" : liveness,
    suspicious: overrides.suspicious ?? [],
    booted_at: null,
  };
}

export class FakeController {
  rows = new Map<string, FleetRow>();
  commands = new Map<string, Command>();
  issueCalls = 0;
  failNextFleet = false;
  rejectActions: string | null = null;

  fleetView(): FleetView {
    return { generated_at: 200, rows: [...this.rows.values()] };
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });

    if (path === "/v1/fleet") {
      if (this.failNextFleet) {
        this.failNextFleet = false;
        throw new TypeError("fetch failed");
      }
      return respond(200, { v: 1, fleet: this.fleetView() });
    }
    const detail = path.match(/^\/v1\/machines\/([^/]+)$/);
    if (detail) {
      const agent = decodeURIComponent(detail[1]);
      const row = this.rows.get(agent);
      if (!row) return respond(404, { v: 1, error: `unknown agent '${agent}'` });
      return respond(200, {
        v: 1,
        machine: row.machine,
        latest: row.latest,
        liveness: row.liveness,
        suspicious: row.suspicious,
        commands: [...this.commands.values()].filter((c) => c.target === agent),
      });
    }
    const action = path.match(/^\/v1\/machines\/([^/]+)\/actions$/);
    if (action && init?.method === "POST") {
      this.issueCalls += 1;
      if (this.rejectActions) return respond(401, { v: 1, error: this.rejectActions });
      const agent = decodeURIComponent(action[1]);
      if (!this.rows.has(agent)) return respond(404, { v: 1, error: `unknown agent '${agent}'` });
      const kind = (JSON.parse(String(init.body)) as { kind: CommandKind }).kind;
      const command: Command = {
        command_id: `cmd-${commandCounter++}`,
        target: agent,
        kind,
        issued_at: 200,
        expires_at: 500,
        state: "PENDING",
        result_note: null,
      };
      this.commands.set(command.command_id, command);
      return respond(200, { v: 1, command });
    }
    const quarantine = path.match(/^\/v1\/machines\/([^/]+)\/quarantine$/);
    if (quarantine && init?.method === "POST") {
      const agent = decodeURIComponent(quarantine[1]);
      const row = this.rows.get(agent);
      if (!row) return respond(404, { v: 1, error: "unknown" });
      const on = (JSON.parse(String(init.body)) as { on: boolean }).on;
      row.machine.quarantined = on;
      row.badge = on ? "QUARANTINED" : row.liveness;
      return respond(200, { v: 1, machine: row.machine });
    }
    const lookup = path.match(/^\/v1\/commands\/([^/]+)$/);
    if (lookup) {
      const command = this.commands.get(decodeURIComponent(lookup[1]));
      if (!command) return respond(404, { v: 1, error: "unknown command" });
      return respond(200, { v: 1, command });
    }
    return respond(404, { v: 1, error: `no route ${path}` });
  };
}
