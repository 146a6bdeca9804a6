// Shapes of the controller API payloads the dashboard consumes.
// Rows render 1:1 from GET /v1/fleet; the client never synthesizes rows.

export interface TrafficCounters {
  rx_bytes: number;
  tx_bytes: number;
  rx_packets: number;
  tx_packets: number;
}

export interface ProcessInfo {
  name: string;
  pid: number;
  memory_kb: number;
}

export interface StatusEntry {
  agent: string;
  seq: number;
  timestamp: number;
  status: "BUSY" | "IDLE";
  idle_seconds: number;
  processes: ProcessInfo[];
  traffic: TrafficCounters;
  degraded: boolean;
  traffic_reset: boolean;
}

export interface Machine {
  agent: string;
  address: string;
  display_class: string;
  quarantined: boolean;
  last_seen: number | null;
  registered_at: number;
}

export type Liveness = "ACTIVE" | "STALE" | "OFFLINE";
export type Badge = Liveness | "QUARANTINED";

export interface FleetRow {
  machine: Machine;
  latest: StatusEntry | null;
  liveness: Liveness;
  badge: Badge;
  suspicious: string[];
  booted_at: number | null;
}

export interface FleetView {
  generated_at: number;
  rows: FleetRow[];
}

export type CommandKind = "SHUTDOWN" | "RESTART" | "LOGOFF" | "HIBERNATE";
export type CommandState = "PENDING" | "EXECUTED" | "FAILED" | "EXPIRED";

export interface Command {
  command_id: string;
  target: string;
  kind: CommandKind;
  issued_at: number;
  expires_at: number;
  state: CommandState;
  result_note: string | null;
}

export interface MachineDetail {
  machine: Machine;
  latest: StatusEntry | null;
  liveness: Liveness | null;
  suspicious: string[];
  commands: Command[];
}
