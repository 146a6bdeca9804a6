import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DashboardStore, splitSections, sortRows } from "../src/state.js";
import { renderApp, renderDetail, renderFleet } from "../src/render.js";
import { FakeController, makeRow } from "./fake_controller.js";

let server: FakeController;
let store: DashboardStore;

beforeEach(() => {
  server = new FakeController();
  store = new DashboardStore(new ApiClient("http://ctl", "tok", server.fetch));
});

describe("sections", () => {
  it("one offline machine drops to the non-active section", async () => {
    server.rows.set("pc-a", makeRow("pc-a"));
    server.rows.set("pc-b", makeRow("pc-b"));
    server.rows.set("pc-c", makeRow("pc-c", { liveness: "OFFLINE" }));
    await store.refresh(200);
    const { active, inactive } = splitSections(store.fleet!.rows);
    expect(active.map((r) => r.machine.agent)).toEqual(["pc-a", "pc-b"]);
    expect(inactive.map((r) => r.machine.agent)).toEqual(["pc-c"]);
    const html = renderFleet(store, 200);
    expect(html).toContain("Active");
    expect(html).toContain("Not reporting");
  });

  it("empty fleet renders the empty-state panel", async () => {
    await store.refresh(200);
    expect(renderFleet(store, 200)).toContain("No machines registered yet");
  });

  it("quarantined badge overrides liveness badge", async () => {
    server.rows.set("pc-a", makeRow("pc-a", { quarantined: true }));
    await store.refresh(200);
    expect(store.fleet!.rows[0].badge).toBe("QUARANTINED");
    expect(renderFleet(store, 200)).toContain("QUARANTINED");
  });

  it("rows render 1:1 with the payload", async () => {
    for (const name of ["pc-a", "pc-b", "pc-c", "pc-d"]) {
      server.rows.set(name, makeRow(name, { liveness: name === "pc-d" ? "STALE" : "ACTIVE" }));
    }
    await store.refresh(200);
    const html = renderFleet(store, 200);
    const rowCount = (html.match(/class="fleet-row/g) ?? []).length;
    expect(rowCount).toBe(4);
  });
});

describe("sorting", () => {
  it("sorts by any column both directions", async () => {
    const rows = [
      makeRow("pc-a", { idle: 30 }),
      makeRow("pc-b", { idle: 700 }),
      makeRow("pc-c", { idle: 100 }),
    ];
    const byIdle = sortRows(rows, "idle", true).map((r) => r.machine.agent);
    expect(byIdle).toEqual(["pc-a", "pc-c", "pc-b"]);
    const byIdleDesc = sortRows(rows, "idle", false).map((r) => r.machine.agent);
    expect(byIdleDesc).toEqual(["pc-b", "pc-c", "pc-a"]);
  });

  it("toggles direction on repeated header clicks", () => {
    store.setSort("idle");
    expect(store.sortAsc).toBe(true);
    store.setSort("idle");
    expect(store.sortAsc).toBe(false);
  });
});

describe("connection failures", () => {
  it("failed poll shows a banner and keeps the previous view", async () => {
    server.rows.set("pc-a", makeRow("pc-a"));
    await store.refresh(200);
    server.failNextFleet = true;
    await store.refresh(260);
    expect(store.connectionError).toContain("unreachable");
    expect(store.fleet!.rows).toHaveLength(1); // stale data survives, still rendered
    expect(store.lastRefreshAt).toBe(200); // labeled with its true age
    expect(renderApp(store, 260)).toContain("Controller unreachable");
  });

  it("staleness label always rendered", async () => {
    server.rows.set("pc-a", makeRow("pc-a"));
    await store.refresh(200);
    expect(renderApp(store, 230)).toContain("30s ago");
  });
});

describe("machine detail", () => {
  it("shows processes name-sorted and traffic deltas across two polls", async () => {
    server.rows.set("pc-a", makeRow("pc-a", { rx: 1000, tx: 500 }));
    await store.refresh(200);
    server.rows.set("pc-a", makeRow("pc-a", { rx: 4000, tx: 700 }));
    await store.refresh(205);
    await store.select("pc-a");
    expect(store.trafficDelta("pc-a")).toEqual({ rx: 3000, tx: 200 });
    const html = renderDetail(store, 205);
    expect(html).toContain("browser");
    expect(html).toContain("editor");
    expect(html).toContain("Δ rx 2.9 KiB");
  });

  it("unknown agent shows the not-found panel", async () => {
    await store.select("ghost");
    expect(store.detailMissing).toBe(true);
    expect(renderDetail(store, 200)).toContain("Machine not found");
  });
});

describe("actions", () => {
  const yes = () => true;
  const no = () => false;

  beforeEach(async () => {
    server.rows.set("pc-a", makeRow("pc-a"));
    await store.refresh(200);
  });

  it("destructive actions require confirmation", async () => {
    const declined = await store.requestAction("pc-a", "SHUTDOWN", no);
    expect(declined).toBeNull();
    expect(server.issueCalls).toBe(0);
    const accepted = await store.requestAction("pc-a", "SHUTDOWN", yes);
    expect(accepted?.state).toBe("PENDING");
    expect(server.issueCalls).toBe(1);
  });

  it("double-click issues a single command", async () => {
    const [first, second] = await Promise.all([
      store.requestAction("pc-a", "SHUTDOWN", yes),
      store.requestAction("pc-a", "SHUTDOWN", yes),
    ]);
    expect(server.issueCalls).toBe(1);
    expect([first, second].filter((c) => c !== null)).toHaveLength(1);
  });

  it("button stays disabled while the command is pending", async () => {
    await store.requestAction("pc-a", "SHUTDOWN", yes);
    expect(store.hasOpenAction("pc-a")).toBe(true);
    const again = await store.requestAction("pc-a", "RESTART", yes);
    expect(again).toBeNull();
    await store.select("pc-a");
    expect(renderDetail(store, 200)).toContain("disabled");
  });

  it("lifecycle badge follows the command through the API", async () => {
    const command = await store.requestAction("pc-a", "SHUTDOWN", yes);
    expect(command).not.toBeNull();
    server.commands.get(command!.command_id)!.state = "EXECUTED";
    await store.refresh(260);
    expect(store.tracked.get(command!.command_id)!.state).toBe("EXECUTED");
    expect(store.hasOpenAction("pc-a")).toBe(false);
  });

  it("API rejection is rendered inline, no state change", async () => {
    server.rejectActions = "missing or bad bearer token";
    await store.requestAction("pc-a", "SHUTDOWN", yes);
    expect(store.actionErrors.get("pc-a")).toContain("bearer token");
    expect(store.tracked.size).toBe(0);
    await store.select("pc-a");
    expect(renderDetail(store, 200)).toContain("bearer token");
  });
});

describe("acknowledgement by absence", () => {
  it("executed shutdown plus row leaving ACTIVE raises the toast", async () => {
    server.rows.set("pc-a", makeRow("pc-a"));
    await store.refresh(200);
    const command = await store.requestAction("pc-a", "SHUTDOWN", () => true);
    server.commands.get(command!.command_id)!.state = "EXECUTED";
    await store.refresh(210); // still ACTIVE: no toast yet
    expect(store.toasts).toHaveLength(0);
    server.rows.set("pc-a", makeRow("pc-a", { liveness: "STALE" }));
    await store.refresh(260);
    expect(store.toasts).toHaveLength(1);
    expect(store.toasts[0].message).toContain("no longer reporting");
    expect(store.toasts[0].message).toContain("shutdown acknowledged");
    await store.refresh(320); // once only
    expect(store.toasts).toHaveLength(1);
    expect(renderApp(store, 320)).toContain("no longer reporting");
  });
});
