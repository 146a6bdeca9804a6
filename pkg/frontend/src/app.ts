// Browser bootstrap: token handling, the poll loop, and one delegated
// click handler. Rendering always reflects the latest completed poll.

import { ApiClient } from "./api.js";
import { DashboardStore } from "./state.js";
import { renderApp } from "./render.js";
import type { CommandKind } from "./types.js";
import type { SortColumn } from "./state.js";

const DEFAULT_POLL_SECONDS = 5;

function nowSeconds(): number {
  return Date.now() / 1000;
}

function getToken(): string {
  let token = sessionStorage.getItem("fleetwarden-token");
  if (!token) {
    token = window.prompt("Controller admin token:") ?? "";
    sessionStorage.setItem("fleetwarden-token", token);
  }
  return token;
}

export function startDashboard(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const pollSeconds = Number(params.get("poll") ?? DEFAULT_POLL_SECONDS);
  const api = new ApiClient(window.location.origin, getToken());
  const store = new DashboardStore(api);

  const render = () => {
    root.innerHTML = renderApp(store, nowSeconds());
  };

  const poll = async () => {
    await store.refresh(nowSeconds());
    store.pruneToasts(nowSeconds());
    render();
  };

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action;
    if (action === "select") {
      void store.select(target.dataset.agent ?? null).then(render);
    } else if (action === "close-detail") {
      event.stopPropagation();
      void store.select(null).then(render);
    } else if (action === "sort") {
      store.setSort((target.dataset.column ?? "agent") as SortColumn);
      render();
    } else if (action === "issue") {
      event.stopPropagation();
      const agent = target.dataset.agent ?? "";
      const kind = (target.dataset.kind ?? "") as CommandKind;
      void store
        .requestAction(agent, kind, (message) => window.confirm(message))
        .then(render);
    } else if (action === "quarantine") {
      event.stopPropagation();
      void store.toggleQuarantine(target.dataset.agent ?? "").then(poll);
    } else if (action === "retry") {
      void poll();
    }
  });

  render();
  void poll();
  window.setInterval(poll, pollSeconds * 1000);
  // keep the freshness label honest between polls
  window.setInterval(() => {
    const label = root.querySelector('[data-role="freshness"]');
    if (label && store.lastRefreshAt !== null) {
      const age = Math.floor(nowSeconds() - store.lastRefreshAt);
      label.textContent = `updated ${new Date(store.lastRefreshAt * 1000).toLocaleTimeString()} (${age}s ago)`;
    }
  }, 1000);
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  startDashboard(rootElement);
}
