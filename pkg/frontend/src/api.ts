// Typed client for the peerplan HTTP API.  One solve may be in flight per
// client at a time: starting another aborts the previous request.

import { ActionLog } from "./actionLog.js";
import type {
  EvaluateResponse,
  ErrorEnvelope,
  NetworkDoc,
  ParamsDoc,
  PartitionDoc,
  RosterDoc,
  SolveRequest,
  SolveResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Rejection used when a newer request displaced this one. */
export class RequestSuperseded extends Error {
  constructor() {
    super("request superseded by a newer one");
    this.name = "RequestSuperseded";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ConsoleApi {
  readonly log: ActionLog;
  private readonly fetchImpl: FetchLike;
  private solveController: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    log?: ActionLog,
    fetchImpl?: FetchLike,
  ) {
    this.log = log ?? new ActionLog();
    // Bind so a bare window.fetch keeps its receiver.
    const impl = fetchImpl ?? globalThis.fetch;
    this.fetchImpl = (input, init) => impl(input, init);
  }

  private async call<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const entry = this.log.open(method, path, body);
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        entry.aborted = true;
        throw new RequestSuperseded();
      }
      throw err;
    }
    entry.status = response.status;
    if (response.status === 204) return undefined as T;
    const payload = await response.json();
    if (!response.ok) {
      const envelope = payload as ErrorEnvelope;
      throw new ApiError(
        response.status,
        envelope.code ?? "unknown",
        envelope.message ?? response.statusText,
        envelope.details ?? {},
      );
    }
    return payload as T;
  }

  createRoster(name: string, network: NetworkDoc): Promise<RosterDoc> {
    return this.call("POST", "/rosters", { name, network });
  }

  getRoster(rosterId: string): Promise<RosterDoc> {
    return this.call("GET", `/rosters/${rosterId}`);
  }

  updateRoster(
    rosterId: string,
    version: number,
    changes: { name?: string; network?: NetworkDoc },
  ): Promise<RosterDoc> {
    return this.call("PUT", `/rosters/${rosterId}`, { version, ...changes });
  }

  deleteRoster(rosterId: string): Promise<void> {
    return this.call("DELETE", `/rosters/${rosterId}`);
  }

  /** Run a solve; any solve still in flight is aborted first. */
  solve(rosterId: string, request: SolveRequest): Promise<SolveResponse> {
    this.solveController?.abort();
    const controller = new AbortController();
    this.solveController = controller;
    return this.call<SolveResponse>(
      "POST",
      `/rosters/${rosterId}/solve`,
      request,
      controller.signal,
    ).finally(() => {
      if (this.solveController === controller) this.solveController = null;
    });
  }

  evaluate(
    rosterId: string,
    partition: PartitionDoc,
    params?: ParamsDoc,
  ): Promise<EvaluateResponse> {
    const body: Record<string, unknown> = { partition };
    if (params !== undefined) body.params = params;
    return this.call("POST", `/rosters/${rosterId}/evaluate`, body);
  }

  getResult(rosterId: string, resultId: string): Promise<Record<string, unknown>> {
    return this.call("GET", `/rosters/${rosterId}/results/${resultId}`);
  }
}
