// HTML-string renderers. Pure functions of the store: the same poll
// renders the same markup. Interactive elements carry data-* attributes
// picked up by the app's single delegated click handler.

import { clockTime, escapeHtml, humanAge, humanBytes, humanDuration } from "./format.js";
import { DashboardStore, sortRows, splitSections } from "./state.js";
import type { Command, FleetRow } from "./types.js";

const ACTION_KINDS = ["SHUTDOWN", "RESTART", "LOGOFF", "HIBERNATE"] as const;

const COLUMNS: { key: string; label: string }[] = [
  { key: "agent", label: "Agent" },
  { key: "address", label: "Address" },
  { key: "badge", label: "Badge" },
  { key: "status", label: "Status" },
  { key: "idle", label: "Idle" },
  { key: "suspicious", label: "Suspicious" },
  { key: "seen", label: "Last seen" },
];

function badgeClass(badge: string): string {
  return `badge badge-${badge.toLowerCase()}`;
}

function renderRow(store: DashboardStore, row: FleetRow, now: number): string {
  const agent = row.machine.agent;
  const latest = row.latest;
  const selected = store.selected === agent ? " row-selected" : "";
  return `
    <tr class="fleet-row${selected}" data-action="select" data-agent="${escapeHtml(agent)}">
      <td>${escapeHtml(agent)}</td>
      <td>${escapeHtml(row.machine.address)}</td>
      <td><span class="${badgeClass(row.badge)}">${row.badge}</span></td>
      <td>${latest ? latest.status : "—"}</td>
      <td>${latest ? humanDuration(latest.idle_seconds) : "—"}</td>
      <td>${row.suspicious.length ? `<span class="suspicious">${row.suspicious.length}</span>` : "0"}</td>
      <td>${humanAge(now, latest ? latest.timestamp : null)}</td>
    </tr>`;
}

function renderSection(store: DashboardStore, rows: FleetRow[], title: string, now: number): string {
  if (!rows.length) return "";
  const sorted = sortRows(rows, store.sortColumn, store.sortAsc);
  return `
    <h2 class="section-title">${title} <span class="count">(${rows.length})</span></h2>
    <table class="fleet">
      <thead><tr>${COLUMNS.map(
        (c) =>
          `<th data-action="sort" data-column="${c.key}">${c.label}${
            store.sortColumn === c.key ? (store.sortAsc ? " ▲" : " ▼") : ""
          }</th>`,
      ).join("")}</tr></thead>
      <tbody>${sorted.map((row) => renderRow(store, row, now)).join("")}</tbody>
    </table>`;
}

export function renderFleet(store: DashboardStore, now: number): string {
  const view = store.fleet;
  if (!view) return `<div class="empty-state">Waiting for the first poll…</div>`;
  if (!view.rows.length) {
    return `<div class="empty-state">No machines registered yet. Enroll agents to see them here.</div>`;
  }
  const { active, inactive } = splitSections(view.rows);
  return (
    renderSection(store, active, "Active", now) +
    renderSection(store, inactive, "Not reporting", now) +
    (active.length === 0
      ? `<div class="empty-state">No machine is currently active.</div>`
      : "")
  );
}

function commandBadge(command: Command): string {
  return `<span class="badge badge-cmd-${command.state.toLowerCase()}">${command.state}</span>`;
}

function renderCommandHistory(commands: Command[]): string {
  if (!commands.length) return `<p class="muted">No commands yet.</p>`;
  const rows = [...commands]
    .sort((a, b) => b.issued_at - a.issued_at)
    .map(
      (c) => `
      <tr>
        <td>${escapeHtml(c.kind)}</td>
        <td>${commandBadge(c)}</td>
        <td>${clockTime(c.issued_at)}</td>
        <td class="muted">${escapeHtml(c.result_note ?? "")}</td>
      </tr>`,
    )
    .join("");
  return `<table class="detail-commands"><thead><tr><th>Kind</th><th>State</th><th>Issued</th><th>Note</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderDetail(store: DashboardStore, now: number): string {
  if (!store.selected) return "";
  if (store.detailMissing) {
    return `<aside class="detail"><h2>${escapeHtml(store.selected)}</h2>
      <div class="empty-state">Machine not found.</div></aside>`;
  }
  const detail = store.detail;
  if (!detail) return `<aside class="detail"><p class="muted">Loading…</p></aside>`;
  const agent = detail.machine.agent;
  const latest = detail.latest;
  const delta = store.trafficDelta(agent);
  const busy = store.hasOpenAction(agent);
  const actionError = store.actionErrors.get(agent);
  const buttons = ACTION_KINDS.map(
    (kind) =>
      `<button data-action="issue" data-agent="${escapeHtml(agent)}" data-kind="${kind}"
        ${busy ? "disabled" : ""}>${kind}</button>`,
  ).join(" ");
  const processes = latest
    ? latest.processes
        .map(
          (p) =>
            `<tr><td>${escapeHtml(p.name)}</td><td>${p.pid}</td><td>${humanBytes(p.memory_kb * 1024)}</td></tr>`,
        )
        .join("")
    : "";
  return `
    <aside class="detail">
      <h2>${escapeHtml(agent)} <span class="muted">${escapeHtml(detail.machine.address)}</span>
        <button class="close" data-action="close-detail">×</button></h2>
      <p>
        ${latest ? `${latest.status}, idle ${humanDuration(latest.idle_seconds)}` : "never reported"}
        · ${detail.machine.display_class}
        ${detail.machine.quarantined ? `· <span class="badge badge-quarantined">QUARANTINED</span>` : ""}
      </p>
      <p class="actions">${buttons}
        <button data-action="quarantine" data-agent="${escapeHtml(agent)}">
          ${detail.machine.quarantined ? "Lift quarantine" : "Quarantine"}
        </button>
      </p>
      ${actionError ? `<p class="inline-error">${escapeHtml(actionError)}</p>` : ""}
      ${busy ? `<p class="muted">command pending…</p>` : ""}
      ${
        latest
          ? `<h3>Traffic</h3>
             <p>rx ${humanBytes(latest.traffic.rx_bytes)} · tx ${humanBytes(latest.traffic.tx_bytes)}
             ${delta ? ` · Δ rx ${humanBytes(delta.rx)} / tx ${humanBytes(delta.tx)} since last poll` : ""}</p>
             <h3>Processes (${latest.processes.length})</h3>
             <table class="detail-procs"><thead><tr><th>Name</th><th>PID</th><th>Memory</th></tr></thead>
             <tbody>${processes}</tbody></table>`
          : ""
      }
      <h3>Commands</h3>
      ${renderCommandHistory([...detail.commands, ...store.commandsFor(agent).filter(
        (c) => !detail.commands.some((d) => d.command_id === c.command_id),
      )])}
    </aside>`;
}

export function renderBanner(store: DashboardStore): string {
  if (!store.connectionError) return "";
  return `<div class="banner banner-error">
    Controller unreachable: ${escapeHtml(store.connectionError)}
    <button data-action="retry">Retry now</button>
  </div>`;
}

export function renderToolbar(store: DashboardStore, now: number): string {
  const freshness =
    store.lastRefreshAt === null
      ? "never refreshed"
      : `updated ${clockTime(store.lastRefreshAt)} (${humanAge(now, store.lastRefreshAt)})`;
  return `<header class="toolbar">
    <h1>fleetwarden</h1>
    <span class="freshness" data-role="freshness">${freshness}</span>
  </header>`;
}

export function renderToasts(store: DashboardStore): string {
  if (!store.toasts.length) return "";
  return `<div class="toasts">${store.toasts
    .map((t) => `<div class="toast">${escapeHtml(t.message)}</div>`)
    .join("")}</div>`;
}

export function renderApp(store: DashboardStore, now: number): string {
  return (
    renderBanner(store) +
    renderToolbar(store, now) +
    `<main class="layout"><section class="fleet-pane">${renderFleet(store, now)}</section>` +
    `${renderDetail(store, now)}</main>` +
    renderToasts(store)
  );
}
