import { describe, expect, it } from "vitest";

import {
  applySolve,
  conflictCards,
  dragBlocked,
  emptyBoard,
  flipRiskOf,
  groupEntries,
  groupsOf,
} from "../src/board.js";
import { solveBody } from "./helpers.js";

describe("group columns", () => {
  it("sorts columns by group index and cards by id", () => {
    const entries = groupEntries({ d: 2, b: 0, a: 0, c: 2 });
    expect(entries).toEqual([
      [0, ["a", "b"]],
      [2, ["c", "d"]],
    ]);
    expect(groupsOf({ d: 2, b: 0 })).toEqual([["b"], ["d"]]);
  });
});

describe("applying a solve response", () => {
  it("copies the layout and clears manual state", () => {
    const state = emptyBoard();
    state.dirty = true;
    state.conflicts = ["a"];
    applySolve(state, solveBody({ a: 0, b: 0 }, { resultId: "res-7", version: 4 }));
    expect(state.assignment).toEqual({ a: 0, b: 0 });
    expect(state.resultId).toBe("res-7");
    expect(state.rosterVersion).toBe(4);
    expect(state.dirty).toBe(false);
    expect(state.conflicts).toEqual([]);
    expect(state.banner.kind).toBe("none");
  });

  it("raises the deviancy banner when the response says so", () => {
    const state = emptyBoard();
    applySolve(state, solveBody({ a: 0 }, { success: -0.05 }));
    expect(state.deviancyWarning).toBe(true);
    expect(state.banner.kind).toBe("deviancy");
    expect(state.banner.message).toContain("Deviancy-training risk");
  });
});

describe("the drag bounds rule", () => {
  it("refuses a drop that would overfill the target", () => {
    const state = emptyBoard();
    state.capacity = { lo: 1, hi: 2 };
    state.assignment = { a: 0, b: 0, c: 1 };
    expect(dragBlocked(state, "c", 0)).toBe("group 0 is full (capacity 1-2)");
    expect(dragBlocked(state, "a", 1)).toBeNull();
  });

  it("treats a move within the same group as room-neutral", () => {
    const state = emptyBoard();
    state.capacity = { lo: 1, hi: 2 };
    state.assignment = { a: 0, b: 0 };
    expect(dragBlocked(state, "a", 0)).toBeNull();
  });

  it("refuses drops into or out of a locked group", () => {
    const state = emptyBoard();
    state.assignment = { a: 0, b: 1 };
    state.frozenGroups = [1];
    expect(dragBlocked(state, "a", 1)).toBe("group 1 is locked");
    expect(dragBlocked(state, "b", 0)).toBe('"b" is in a locked group');
  });
});

describe("the flip badge", () => {
  it("shows the risk that applies to the card's behavior", () => {
    const state = emptyBoard();
    state.network = {
      nodes: [
        { id: "u", behavior: "user" },
        { id: "n", behavior: "non_user" },
      ],
      ties: [],
    };
    state.evaluation = {
      expected_nonusers: 1.5,
      success: 0.2,
      flips: {
        u: { become_user: 0, become_nonuser: 0.8 },
        n: { become_user: 0.3, become_nonuser: 0 },
      },
    };
    expect(flipRiskOf(state, "u")).toBe(0.8);
    expect(flipRiskOf(state, "n")).toBe(0.3);
  });

  it("is absent before any evaluation arrives", () => {
    const state = emptyBoard();
    expect(flipRiskOf(state, "u")).toBeNull();
  });
});

describe("conflict highlighting", () => {
  it("matches whole ids in the error message only", () => {
    const message = "cannot seat p1 with p10 in one group";
    expect(conflictCards(message, ["p1", "p10", "p2"])).toEqual(["p1", "p10"]);
  });

  it("escapes regex metacharacters in ids", () => {
    expect(conflictCards("pin a.b clashes", ["a.b"])).toEqual(["a.b"]);
    expect(conflictCards("pin axb clashes", ["a.b"])).toEqual([]);
  });
});
