// Controller API client. All dashboard state flows through these calls;
// the UI never mutates anything except via these documented endpoints.
// Concurrent requests to the same endpoint are deduplicated: while one
// is in flight, later callers share its promise.

import type { Command, CommandKind, FleetView, MachineDetail } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private endpoint: string,
    private token: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const key = `${method} ${path}`;
    if (method === "GET" && this.inflight.has(key)) {
      return this.inflight.get(key) as Promise<T>;
    }
    const work = (async () => {
      let response: Response;
      try {
        response = await this.fetchImpl(this.endpoint + path, {
          method,
          headers: {
            Authorization: `Bearer ${this.token}`,
            ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
          },
          body: body !== undefined ? JSON.stringify(body) : undefined,
        });
      } catch (err) {
        throw new ApiError(`controller unreachable: ${err}`, 0);
      }
      let doc: Record<string, unknown> = {};
      try {
        doc = (await response.json()) as Record<string, unknown>;
      } catch {
        // non-JSON error body; fall through with status only
      }
      if (!response.ok) {
        const message = (doc.error as string) ?? (doc.detail as string) ?? `HTTP ${response.status}`;
        throw new ApiError(message, response.status);
      }
      return doc as T;
    })();
    if (method === "GET") {
      this.inflight.set(key, work);
      void work.catch(() => undefined).finally(() => this.inflight.delete(key));
    }
    return work as Promise<T>;
  }

  async fleet(): Promise<FleetView> {
    const doc = await this.request<{ fleet: FleetView }>("GET", "/v1/fleet");
    return doc.fleet;
  }

  async machine(agent: string): Promise<MachineDetail> {
    return this.request<MachineDetail>("GET", `/v1/machines/${encodeURIComponent(agent)}`);
  }

  async issueAction(agent: string, kind: CommandKind): Promise<Command> {
    const doc = await this.request<{ command: Command }>(
      "POST",
      `/v1/machines/${encodeURIComponent(agent)}/actions`,
      { kind },
    );
    return doc.command;
  }

  async setQuarantine(agent: string, on: boolean): Promise<void> {
    await this.request("POST", `/v1/machines/${encodeURIComponent(agent)}/quarantine`, { on });
  }

  async command(commandId: string): Promise<Command> {
    const doc = await this.request<{ command: Command }>(
      "GET",
      `/v1/commands/${encodeURIComponent(commandId)}`,
    );
    return doc.command;
  }
}
