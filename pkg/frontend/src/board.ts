// Board state and its pure transitions.  The board only ever displays a
// layout the server scored, or an explicit banner; the sole client-side
// rule is the capacity count that snaps an impossible drag back.

import type {
  CapacityDoc,
  EvaluationDoc,
  NetworkDoc,
  SolveResponse,
} from "./types.js";

export type BannerKind = "none" | "deviancy" | "infeasible" | "error";

export const DEVIANCY_MESSAGE =
  "Deviancy-training risk: this grouping is expected to create users on net.";

export interface Banner {
  kind: BannerKind;
  message: string;
}

export interface BoardState {
  rosterId: string | null;
  rosterVersion: number;
  network: NetworkDoc;
  capacity: CapacityDoc;
  seed: number;
  assignment: Record<string, number>;
  pinned: Record<string, number>;
  mustLink: string[][];
  cannotLink: string[][];
  frozenGroups: number[];
  absent: string[];
  evaluation: EvaluationDoc | null;
  deviancyWarning: boolean;
  resultId: string | null;
  dirty: boolean;
  banner: Banner;
  conflicts: string[];
}

export function emptyBoard(): BoardState {
  return {
    rosterId: null,
    rosterVersion: 0,
    network: { nodes: [], ties: [] },
    capacity: { lo: 3, hi: 8 },
    seed: 7,
    assignment: {},
    pinned: {},
    mustLink: [],
    cannotLink: [],
    frozenGroups: [],
    absent: [],
    evaluation: null,
    deviancyWarning: false,
    resultId: null,
    dirty: false,
    banner: { kind: "none", message: "" },
    conflicts: [],
  };
}

/** Column per group index, in group order, cards sorted by id. */
export function groupEntries(
  assignment: Record<string, number>,
): [number, string[]][] {
  const columns = new Map<number, string[]>();
  for (const [id, group] of Object.entries(assignment)) {
    const column = columns.get(group) ?? [];
    column.push(id);
    columns.set(group, column);
  }
  return [...columns.entries()]
    .sort(([a], [b]) => a - b)
    .map(([group, members]) => [group, members.sort()]);
}

/** The columns alone, for callers that only care about membership. */
export function groupsOf(assignment: Record<string, number>): string[][] {
  return groupEntries(assignment).map(([, members]) => members);
}

export function applySolve(state: BoardState, response: SolveResponse): void {
  state.assignment = { ...response.partition.assignment };
  state.evaluation = response.evaluation;
  state.deviancyWarning = response.deviancy_warning;
  state.resultId = response.result_id;
  state.rosterVersion = response.roster_version;
  state.dirty = false;
  state.conflicts = [];
  state.banner = response.deviancy_warning
    ? { kind: "deviancy", message: DEVIANCY_MESSAGE }
    : { kind: "none", message: "" };
}

/**
 * The what-if bounds rule: a drag is refused client-side only when no
 * server answer could honor it.  Everything else goes to the API.
 */
export function dragBlocked(state: BoardState, id: string, target: number): string | null {
  if (state.frozenGroups.includes(target)) {
    return `group ${target} is locked`;
  }
  const current = state.assignment[id];
  if (state.frozenGroups.includes(current ?? -1)) {
    return `"${id}" is in a locked group`;
  }
  const occupants = Object.entries(state.assignment).filter(
    ([other, group]) => group === target && other !== id,
  ).length;
  if (occupants + 1 > state.capacity.hi) {
    return `group ${target} is full (capacity ${state.capacity.lo}-${state.capacity.hi})`;
  }
  return null;
}

/**
 * The flip probability the badge shows: the risk field that applies to the
 * card's behavior.  The other field is structurally zero.
 */
export function flipRiskOf(state: BoardState, id: string): number | null {
  const risk = state.evaluation?.flips[id];
  if (!risk) return null;
  const node = state.network.nodes.find((entry) => entry.id === id);
  if (!node) return null;
  return node.behavior === "user" ? risk.become_nonuser : risk.become_user;
}

/** Card ids mentioned in an unsatisfiable-constraints message. */
export function conflictCards(message: string, ids: string[]): string[] {
  return ids.filter((id) =>
    new RegExp(`(^|[^A-Za-z0-9_])${id.replace(/[.*+?^${}()|[\]\\]/g, "\\$&")}([^A-Za-z0-9_]|$)`).test(
      message,
    ),
  );
}
