// CSV passthrough: the spreadsheet columns map one to one onto the network
// document, and the assignment table export mirrors the printable view.

import Papa from "papaparse";

import type { Behavior, NetworkDoc, NodeDoc, TieDoc, TieStrength } from "./types.js";

export interface CsvIssue {
  row: number;
  message: string;
}

function parsed(text: string, fields: string[]): { rows: Record<string, string>[]; issues: CsvIssue[] } {
  const issues: CsvIssue[] = [];
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
    transform: (value) => value.trim(),
  });
  const got = result.meta.fields ?? [];
  if (got.join(",") !== fields.join(",")) {
    issues.push({ row: 0, message: `header must be ${fields.join(",")}, got ${got.join(",")}` });
    return { rows: [], issues };
  }
  for (const error of result.errors) {
    issues.push({ row: (error.row ?? -1) + 2, message: error.message });
  }
  return { rows: issues.length ? [] : result.data, issues };
}

export function parsePeopleCsv(text: string): { nodes: NodeDoc[]; issues: CsvIssue[] } {
  const { rows, issues } = parsed(text, ["id", "behavior"]);
  const nodes: NodeDoc[] = [];
  rows.forEach((row, index) => {
    const line = index + 2;
    if (!row.id) {
      issues.push({ row: line, message: "empty id" });
    } else if (row.behavior !== "user" && row.behavior !== "non_user") {
      issues.push({ row: line, message: `behavior must be user or non_user, got "${row.behavior}"` });
    } else {
      nodes.push({ id: row.id, behavior: row.behavior as Behavior });
    }
  });
  return { nodes: issues.length ? [] : nodes, issues };
}

export function parseTiesCsv(text: string): { ties: TieDoc[]; issues: CsvIssue[] } {
  const { rows, issues } = parsed(text, ["from", "to", "strength"]);
  const ties: TieDoc[] = [];
  rows.forEach((row, index) => {
    const line = index + 2;
    if (!row.from || !row.to) {
      issues.push({ row: line, message: "empty endpoint" });
    } else if (row.strength !== "strong" && row.strength !== "weak") {
      issues.push({ row: line, message: `strength must be strong or weak, got "${row.strength}"` });
    } else {
      ties.push({ from: row.from, to: row.to, strength: row.strength as TieStrength });
    }
  });
  return { ties: issues.length ? [] : ties, issues };
}

/** The printable assignment table: one row per person, ordered by group. */
export function assignmentCsv(network: NetworkDoc, assignment: Record<string, number>): string {
  const behaviors = new Map(network.nodes.map((node) => [node.id, node.behavior]));
  const rows = Object.entries(assignment)
    .sort(([a, ga], [b, gb]) => ga - gb || a.localeCompare(b))
    .map(([id, group]) => ({ id, behavior: behaviors.get(id) ?? "", group }));
  return Papa.unparse(rows, { columns: ["id", "behavior", "group"] });
}
