// Dashboard state machine, DOM-free so it can be tested headless.
// Holds the latest completed poll (the only thing ever rendered), the
// commands issued from this session with their live lifecycle, traffic
// deltas between polls, and the acknowledgement-by-absence toasts.

import { ApiClient, ApiError } from "./api.js";
import type {
  Command,
  CommandKind,
  FleetRow,
  FleetView,
  MachineDetail,
} from "./types.js";

export interface Toast {
  message: string;
  at: number;
}

export interface TrafficDelta {
  rx: number;
  tx: number;
}

const CONFIRM_KINDS: CommandKind[] = ["SHUTDOWN", "RESTART", "LOGOFF"];

export type ConfirmFn = (message: string) => boolean | Promise<boolean>;

export type SortColumn = "agent" | "address" | "badge" | "status" | "idle" | "suspicious" | "seen";

export class DashboardStore {
  fleet: FleetView | null = null;
  lastRefreshAt: number | null = null;
  connectionError: string | null = null;
  selected: string | null = null;
  detail: MachineDetail | null = null;
  detailMissing = false;
  toasts: Toast[] = [];
  tracked = new Map<string, Command>();
  actionErrors = new Map<string, string>();
  sortColumn: SortColumn = "agent";
  sortAsc = true;

  private prevTraffic = new Map<string, { rx: number; tx: number }>();
  private trafficDeltas = new Map<string, TrafficDelta>();
  private prevActive = new Set<string>();
  private acknowledged = new Set<string>();
  private inflightActions = new Set<string>();

  constructor(private api: ApiClient) {}

  trafficDelta(agent: string): TrafficDelta | null {
    return this.trafficDeltas.get(agent) ?? null;
  }

  /** One poll: fetch the fleet (and detail if open), derive deltas and toasts. */
  async refresh(now: number): Promise<void> {
    let view: FleetView;
    try {
      view = await this.api.fleet();
    } catch (err) {
      this.connectionError = err instanceof ApiError ? err.message : String(err);
      return; // keep rendering the last completed poll, labeled stale
    }
    this.connectionError = null;
    this.lastRefreshAt = now;

    for (const row of view.rows) {
      if (!row.latest) continue;
      const prev = this.prevTraffic.get(row.machine.agent);
      const current = { rx: row.latest.traffic.rx_bytes, tx: row.latest.traffic.tx_bytes };
      if (prev) {
        this.trafficDeltas.set(row.machine.agent, {
          rx: Math.max(0, current.rx - prev.rx),
          tx: Math.max(0, current.tx - prev.tx),
        });
      }
      this.prevTraffic.set(row.machine.agent, current);
    }

    await this.refreshTrackedCommands();
    this.detectAcknowledgements(view, now);
    this.fleet = view;
    this.prevActive = new Set(
      view.rows.filter((r) => r.liveness === "ACTIVE").map((r) => r.machine.agent),
    );

    if (this.selected) {
      await this.loadDetail(this.selected);
    }
  }

  private async refreshTrackedCommands(): Promise<void> {
    for (const [id, command] of this.tracked) {
      if (command.state !== "PENDING") continue;
      try {
        this.tracked.set(id, await this.api.command(id));
      } catch {
        // transient; state stays PENDING until the next poll confirms it
      }
    }
  }

  /** The signal that a shutdown landed: the machine stops reporting. */
  private detectAcknowledgements(view: FleetView, now: number): void {
    for (const command of this.tracked.values()) {
      if (command.kind !== "SHUTDOWN" && command.kind !== "HIBERNATE") continue;
      if (command.state !== "EXECUTED" || this.acknowledged.has(command.command_id)) continue;
      const row = view.rows.find((r) => r.machine.agent === command.target);
      const wasActive = this.prevActive.has(command.target);
      if (row && row.liveness !== "ACTIVE" && wasActive) {
        this.acknowledged.add(command.command_id);
        this.toasts.push({
          message: `${command.target} no longer reporting — ${command.kind.toLowerCase()} acknowledged`,
          at: now,
        });
      }
    }
  }

  async select(agent: string | null): Promise<void> {
    this.selected = agent;
    this.detail = null;
    this.detailMissing = false;
    if (agent) {
      await this.loadDetail(agent);
    }
  }

  private async loadDetail(agent: string): Promise<void> {
    try {
      this.detail = await this.api.machine(agent);
      this.detailMissing = false;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.detail = null;
        this.detailMissing = true;
      }
    }
  }

  /** Is there an open (in-flight or PENDING) action for this machine? */
  hasOpenAction(agent: string): boolean {
    if (this.inflightActions.has(agent)) return true;
    for (const command of this.tracked.values()) {
      if (command.target === agent && command.state === "PENDING") return true;
    }
    return false;
  }

  /**
   * Issue an action from the UI. Destructive kinds always confirm first;
   * a second click while one is open is a no-op, so a double-click can
   * only ever produce a single command.
   */
  async requestAction(
    agent: string,
    kind: CommandKind,
    confirm: ConfirmFn,
  ): Promise<Command | null> {
    if (this.hasOpenAction(agent)) return null;
    this.inflightActions.add(agent);
    try {
      if (CONFIRM_KINDS.includes(kind)) {
        const accepted = await confirm(`${kind} ${agent} — are you sure?`);
        if (!accepted) return null;
      }
      const command = await this.api.issueAction(agent, kind);
      this.tracked.set(command.command_id, command);
      this.actionErrors.delete(agent);
      return command;
    } catch (err) {
      this.actionErrors.set(agent, err instanceof ApiError ? err.message : String(err));
      return null;
    } finally {
      this.inflightActions.delete(agent);
    }
  }

  async toggleQuarantine(agent: string): Promise<void> {
    const row = this.fleet?.rows.find((r) => r.machine.agent === agent);
    if (!row) return;
    try {
      await this.api.setQuarantine(agent, !row.machine.quarantined);
    } catch (err) {
      this.actionErrors.set(agent, err instanceof ApiError ? err.message : String(err));
    }
  }

  setSort(column: SortColumn): void {
    if (this.sortColumn === column) {
      this.sortAsc = !this.sortAsc;
    } else {
      this.sortColumn = column;
      this.sortAsc = true;
    }
  }

  commandsFor(agent: string): Command[] {
    return [...this.tracked.values()].filter((c) => c.target === agent);
  }

  pruneToasts(now: number, maxAge = 30): void {
    this.toasts = this.toasts.filter((t) => now - t.at < maxAge);
  }
}

function sortKey(row: FleetRow, column: SortColumn): string | number {
  switch (column) {
    case "agent":
      return row.machine.agent;
    case "address":
      return row.machine.address;
    case "badge":
      return row.badge;
    case "status":
      return row.latest?.status ?? "";
    case "idle":
      return row.latest?.idle_seconds ?? -1;
    case "suspicious":
      return row.suspicious.length;
    case "seen":
      return row.latest?.timestamp ?? 0;
  }
}

export function sortRows(rows: FleetRow[], column: SortColumn, asc: boolean): FleetRow[] {
  const sorted = [...rows].sort((a, b) => {
    const ka = sortKey(a, column);
    const kb = sortKey(b, column);
    if (ka < kb) return -1;
    if (ka > kb) return 1;
    return a.machine.agent < b.machine.agent ? -1 : 1;
  });
  return asc ? sorted : sorted.reverse();
}

/** Active machines up top; everything else drops to the lower section. */
export function splitSections(rows: FleetRow[]): { active: FleetRow[]; inactive: FleetRow[] } {
  return {
    active: rows.filter((r) => r.liveness === "ACTIVE"),
    inactive: rows.filter((r) => r.liveness !== "ACTIVE"),
  };
}
