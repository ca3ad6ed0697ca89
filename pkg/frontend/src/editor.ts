// Roster entry with the same structural rules the server enforces, applied
// before anything leaves the browser: no duplicate people, no self-ties, no
// duplicate ties, no tie to someone not on the roster.

import { parsePeopleCsv, parseTiesCsv } from "./csv.js";
import type { Behavior, NetworkDoc, NodeDoc, TieDoc, TieStrength } from "./types.js";

export type EditResult = { ok: true } | { ok: false; error: string };

const ok: EditResult = { ok: true };

function fail(error: string): EditResult {
  return { ok: false, error };
}

export class RosterDraft {
  name = "";
  private nodes: NodeDoc[] = [];
  private ties: TieDoc[] = [];

  addPerson(id: string, behavior: Behavior): EditResult {
    const trimmed = id.trim();
    if (!trimmed) return fail("id must not be empty");
    if (this.nodes.some((node) => node.id === trimmed)) {
      return fail(`"${trimmed}" is already on the roster`);
    }
    this.nodes.push({ id: trimmed, behavior });
    return ok;
  }

  removePerson(id: string): EditResult {
    const index = this.nodes.findIndex((node) => node.id === id);
    if (index < 0) return fail(`"${id}" is not on the roster`);
    this.nodes.splice(index, 1);
    this.ties = this.ties.filter((tie) => tie.from !== id && tie.to !== id);
    return ok;
  }

  toggleBehavior(id: string): EditResult {
    const node = this.nodes.find((entry) => entry.id === id);
    if (!node) return fail(`"${id}" is not on the roster`);
    node.behavior = node.behavior === "user" ? "non_user" : "user";
    return ok;
  }

  addTie(from: string, to: string, strength: TieStrength): EditResult {
    if (from === to) return fail("a tie cannot point at its own source");
    for (const endpoint of [from, to]) {
      if (!this.nodes.some((node) => node.id === endpoint)) {
        return fail(`"${endpoint}" is not on the roster`);
      }
    }
    if (this.ties.some((tie) => tie.from === from && tie.to === to)) {
      return fail(`the tie ${from} -> ${to} already exists`);
    }
    this.ties.push({ from, to, strength });
    return ok;
  }

  removeTie(from: string, to: string): EditResult {
    const index = this.ties.findIndex((tie) => tie.from === from && tie.to === to);
    if (index < 0) return fail(`no tie ${from} -> ${to}`);
    this.ties.splice(index, 1);
    return ok;
  }

  /** Replace the draft with CSV contents; rejected wholesale on any issue. */
  importCsv(peopleText: string, tiesText: string): EditResult & { people?: number; ties?: number } {
    const people = parsePeopleCsv(peopleText);
    const ties = parseTiesCsv(tiesText);
    const issues = [...people.issues, ...ties.issues];
    if (issues.length) {
      const first = issues[0]!;
      return fail(`row ${first.row}: ${first.message}`);
    }
    const replacement = new RosterDraft();
    for (const node of people.nodes) {
      const added = replacement.addPerson(node.id, node.behavior);
      if (!added.ok) return added;
    }
    for (const tie of ties.ties) {
      const added = replacement.addTie(tie.from, tie.to, tie.strength);
      if (!added.ok) return added;
    }
    this.nodes = replacement.nodes;
    this.ties = replacement.ties;
    return { ok: true, people: this.nodes.length, ties: this.ties.length };
  }

  loadNetwork(network: NetworkDoc): void {
    this.nodes = network.nodes.map((node) => ({ ...node }));
    this.ties = network.ties.map((tie) => ({ ...tie }));
  }

  network(): NetworkDoc {
    return {
      nodes: this.nodes.map((node) => ({ ...node })),
      ties: this.ties.map((tie) => ({ ...tie })),
    };
  }

  counts(): { people: number; ties: number } {
    return { people: this.nodes.length, ties: this.ties.length };
  }
}
