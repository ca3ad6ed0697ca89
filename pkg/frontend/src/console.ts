// The console's spine.  Holds the board, the roster draft, and the API
// client; every user action maps to at most one HTTP call, and the board
// only changes when a response comes back (or a banner explains why not).

import { ApiError, ConsoleApi, RequestSuperseded } from "./api.js";
import type { BoardState } from "./board.js";
import {
  DEVIANCY_MESSAGE,
  applySolve,
  conflictCards,
  dragBlocked,
  emptyBoard,
} from "./board.js";
import { RosterDraft } from "./editor.js";
import type { ConstraintsDoc, SolveRequest } from "./types.js";

export class GroupConsole {
  readonly state: BoardState = emptyBoard();
  readonly draft = new RosterDraft();

  /** Drags either steer the solver (pin + re-solve) or sketch a manual layout. */
  manualMode = false;

  private listeners: (() => void)[] = [];

  constructor(readonly api: ConsoleApi) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  private requireRoster(): string {
    const id = this.state.rosterId;
    if (id === null) throw new Error("no roster loaded; save one first");
    return id;
  }

  private constraints(): ConstraintsDoc {
    return {
      pinned: { ...this.state.pinned },
      must_link: this.state.mustLink.map((pair) => [...pair]),
      cannot_link: this.state.cannotLink.map((pair) => [...pair]),
      frozen_groups: [...this.state.frozenGroups],
    };
  }

  private solveRequest(reoptimize = false): SolveRequest {
    const request: SolveRequest = {
      algo: "lns",
      seed: this.state.seed,
      params: { capacity: { ...this.state.capacity } },
      constraints: this.constraints(),
      absent: [...this.state.absent],
    };
    if (reoptimize) request.reoptimize = true;
    return request;
  }

  private async runSolve(request: SolveRequest): Promise<void> {
    const rosterId = this.requireRoster();
    try {
      const response = await this.api.solve(rosterId, request);
      applySolve(this.state, response);
    } catch (err) {
      this.applyError(err);
    } finally {
      this.notify();
    }
  }

  private applyError(err: unknown): void {
    if (err instanceof RequestSuperseded) return;
    if (!(err instanceof ApiError)) throw err;
    if (err.status === 409 && err.code === "unsatisfiable_constraints") {
      // The last valid layout stays on screen; the message names the
      // offenders, so light up every card it mentions.
      this.state.banner = { kind: "infeasible", message: err.message };
      this.state.conflicts = conflictCards(
        err.message,
        this.state.network.nodes.map((node) => node.id),
      );
      return;
    }
    this.state.banner = { kind: "error", message: err.message };
  }

  /**
   * Persist the draft: a new roster is POSTed, a loaded one is PUT with the
   * version echo so a stale copy gets a conflict instead of clobbering.
   */
  async saveRoster(): Promise<void> {
    const name = this.draft.name.trim() || "untitled";
    try {
      const roster =
        this.state.rosterId === null
          ? await this.api.createRoster(name, this.draft.network())
          : await this.api.updateRoster(this.state.rosterId, this.state.rosterVersion, {
              name,
              network: this.draft.network(),
            });
      this.state.rosterId = roster.id;
      this.state.rosterVersion = roster.version;
      this.state.network = roster.network;
    } catch (err) {
      this.applyError(err);
    } finally {
      this.notify();
    }
  }

  /** Re-fetch the saved roster; the board and draft mirror the server copy. */
  async reloadRoster(): Promise<void> {
    try {
      const roster = await this.api.getRoster(this.requireRoster());
      this.state.rosterVersion = roster.version;
      this.state.network = roster.network;
      this.draft.name = roster.name;
      this.draft.loadNetwork(roster.network);
    } catch (err) {
      this.applyError(err);
    } finally {
      this.notify();
    }
  }

  /** Ask the solver for a layout under the current pins and absences. */
  recommend(): Promise<void> {
    return this.runSolve(this.solveRequest());
  }

  /** Drop the minimal-disruption pins and search from scratch. */
  reoptimizeNow(): Promise<void> {
    return this.runSolve(this.solveRequest(true));
  }

  /** A drop on the board: steer the solver, or just sketch in manual mode. */
  dropCard(id: string, group: number): Promise<void> {
    const blocked = dragBlocked(this.state, id, group);
    if (blocked) {
      // Snap back: the assignment is untouched, so the card re-renders in
      // its old column with the refusal spelled out.
      this.state.banner = { kind: "error", message: blocked };
      this.notify();
      return Promise.resolve();
    }
    if (this.manualMode) {
      this.state.assignment[id] = group;
      this.state.dirty = true;
      this.notify();
      return Promise.resolve();
    }
    this.state.pinned[id] = group;
    return this.runSolve(this.solveRequest());
  }

  /** Freeze a group: its members are pinned and nobody else may enter. */
  lockGroup(group: number): Promise<void> {
    for (const [id, current] of Object.entries(this.state.assignment)) {
      if (current === group && !this.state.absent.includes(id)) {
        this.state.pinned[id] = group;
      }
    }
    if (!this.state.frozenGroups.includes(group)) {
      this.state.frozenGroups.push(group);
    }
    return this.runSolve(this.solveRequest());
  }

  /** A no-show: drop the card and re-solve around everyone else's seats. */
  markAbsent(id: string): Promise<void> {
    if (!this.state.absent.includes(id)) this.state.absent.push(id);
    delete this.state.pinned[id];
    return this.runSolve(this.solveRequest());
  }

  /** Score the layout as drawn, without moving anything. */
  async evaluateManual(): Promise<void> {
    const rosterId = this.requireRoster();
    try {
      const response = await this.api.evaluate(rosterId, {
        assignment: { ...this.state.assignment },
      });
      this.state.evaluation = response;
      this.state.deviancyWarning = response.deviancy_warning;
      this.state.resultId = null;
      this.state.dirty = false;
      this.state.conflicts = [];
      this.state.banner = response.deviancy_warning
        ? { kind: "deviancy", message: DEVIANCY_MESSAGE }
        : { kind: "none", message: "" };
    } catch (err) {
      this.applyError(err);
    } finally {
      this.notify();
    }
  }

  addMustLink(a: string, b: string): void {
    this.state.mustLink.push([a, b]);
    this.notify();
  }

  addCannotLink(a: string, b: string): void {
    this.state.cannotLink.push([a, b]);
    this.notify();
  }

  unpin(id: string): void {
    delete this.state.pinned[id];
    this.notify();
  }

  setSeed(seed: number): void {
    this.state.seed = seed;
    this.notify();
  }

  setCapacity(lo: number, hi: number): void {
    this.state.capacity = { lo, hi };
    this.notify();
  }
}
