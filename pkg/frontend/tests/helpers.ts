// Test doubles: a routed fetch fake that records every call, plus canned
// response factories shaped like the server's documents.

import type { NetworkDoc, RosterDoc, SolveResponse } from "../src/types.js";

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export type Responder = (
  call: RecordedCall,
) => { status: number; body: unknown } | "hang" | undefined;

export function fakeFetch(respond: Responder): {
  fetch: (input: string, init?: RequestInit) => Promise<Response>;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const impl = (input: string, init?: RequestInit): Promise<Response> => {
    const call: RecordedCall = {
      method: init?.method ?? "GET",
      path: input,
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    calls.push(call);
    const outcome = respond(call);
    return new Promise((resolve, reject) => {
      const abort = () =>
        reject(new DOMException("The operation was aborted.", "AbortError"));
      const signal = init?.signal;
      if (signal?.aborted) return abort();
      signal?.addEventListener("abort", abort);
      if (outcome === undefined) {
        reject(new Error(`unrouted ${call.method} ${call.path}`));
      } else if (outcome !== "hang") {
        resolve({
          ok: outcome.status < 400,
          status: outcome.status,
          statusText: String(outcome.status),
          json: () => Promise.resolve(outcome.body),
        } as unknown as Response);
      }
    });
  };
  return { fetch: impl, calls };
}

/** Let queued fetch promise chains settle. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export function rosterBody(
  id: string,
  name: string,
  network: NetworkDoc,
  version: number,
): RosterDoc {
  return {
    id,
    name,
    created_at: "2024-05-01T10:00:00Z",
    updated_at: "2024-05-01T10:00:00Z",
    version,
    network,
    history: [],
  };
}

export function solveBody(
  assignment: Record<string, number>,
  options: {
    success?: number;
    expected?: number;
    flips?: Record<string, { become_user: number; become_nonuser: number }>;
    resultId?: string;
    version?: number;
  } = {},
): SolveResponse {
  const success = options.success ?? 0.4;
  const flips =
    options.flips ??
    Object.fromEntries(
      Object.keys(assignment).map((id) => [
        id,
        { become_user: 0.1, become_nonuser: 0.2 },
      ]),
    );
  return {
    algorithm: "lns",
    partition: { assignment },
    evaluation: {
      expected_nonusers: options.expected ?? 4.5,
      success,
      flips,
    },
    restarts_completed: 10,
    improvement_trace: [{ restart: 0, objective: options.expected ?? 4.5 }],
    result_id: options.resultId ?? "res-1",
    roster_version: options.version ?? 2,
    deviancy_warning: success < 0,
  };
}
