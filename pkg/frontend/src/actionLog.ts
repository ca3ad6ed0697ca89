// Every API call the console issues, in order, with its outcome.  The log
// is the replayable record of a session: exporting it yields the exact
// request list a script could replay against the same server.

export interface LoggedCall {
  seq: number;
  at: string;
  method: string;
  path: string;
  body?: unknown;
  status?: number;
  aborted?: boolean;
}

export class ActionLog {
  private calls: LoggedCall[] = [];

  open(method: string, path: string, body?: unknown): LoggedCall {
    const entry: LoggedCall = {
      seq: this.calls.length,
      at: new Date().toISOString(),
      method,
      path,
    };
    if (body !== undefined) entry.body = body;
    this.calls.push(entry);
    return entry;
  }

  entries(): readonly LoggedCall[] {
    return this.calls;
  }

  exportJson(): string {
    return JSON.stringify(this.calls, null, 2);
  }
}
