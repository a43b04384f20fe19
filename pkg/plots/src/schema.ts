/**
 * Sweep CSV contract.
 *
 * A sweep file holds trial rows followed by aggregate rows, sixteen columns
 * each in a fixed order. Trial rows carry a per-trial seed (64-bit, kept as
 * a string since it can exceed Number.MAX_SAFE_INTEGER); aggregate rows
 * reuse the seed column for their label and the failure column for a
 * "failed/total" pair on mean rows.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export const CSV_FIELDS = [
  "seed",
  "m",
  "u",
  "r",
  "r1",
  "gamma",
  "d",
  "alpha",
  "algo",
  "adversary",
  "exact_error",
  "h0_weight",
  "in_spart1",
  "frs_minus_fraction",
  "rounds_used",
  "failure",
] as const;

export const AGGREGATE_LABELS = ["mean", "median", "frac_spart1"] as const;

export type AggregateLabel = (typeof AGGREGATE_LABELS)[number];

export interface TrialRow {
  seed: string;
  m: number;
  u: number;
  r: number;
  r1: number;
  gamma: number;
  d: number;
  alpha: number;
  algo: string;
  adversary: string;
  exactError: number;
  h0Weight: number;
  inSpart1: boolean;
  frsMinusFraction: number;
  roundsUsed: number;
  failure: string | null;
}

export interface AggregateRow {
  label: AggregateLabel;
  m: number;
  algo: string;
  adversary: string;
  /** Column values keyed by CSV field name, parsed as numbers. */
  values: Record<string, number>;
  /** "failed/total" on mean rows, verbatim. */
  failure: string | null;
}

export interface SweepTable {
  trials: TrialRow[];
  aggregates: AggregateRow[];
}

/** Raised when a CSV does not conform; always names the offending column. */
export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, detail: string) {
    super(`column "${column}": ${detail}`);
    this.name = "SchemaError";
    this.column = column;
  }
}

const NUMERIC_FIELDS = [
  "m",
  "u",
  "r",
  "r1",
  "gamma",
  "d",
  "alpha",
  "exact_error",
  "h0_weight",
  "frs_minus_fraction",
  "rounds_used",
] as const;

function numberOrThrow(raw: string, column: string, line: number): number {
  // Number("") is 0, so reject blanks explicitly before converting.
  if (raw.trim() === "") {
    throw new SchemaError(column, `empty value on line ${line}`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(column, `"${raw}" is not a number (line ${line})`);
  }
  return value;
}

function parseTrial(record: Record<string, string>, line: number): TrialRow {
  const spart = record["in_spart1"]!;
  if (spart !== "true" && spart !== "false") {
    throw new SchemaError(
      "in_spart1",
      `"${spart}" is not true/false (line ${line})`,
    );
  }
  const num = (field: (typeof NUMERIC_FIELDS)[number]) =>
    numberOrThrow(record[field]!, field, line);
  return {
    seed: record["seed"]!,
    m: num("m"),
    u: num("u"),
    r: num("r"),
    r1: num("r1"),
    gamma: num("gamma"),
    d: num("d"),
    alpha: num("alpha"),
    algo: record["algo"]!,
    adversary: record["adversary"]!,
    exactError: num("exact_error"),
    h0Weight: num("h0_weight"),
    inSpart1: spart === "true",
    frsMinusFraction: num("frs_minus_fraction"),
    roundsUsed: num("rounds_used"),
    failure: record["failure"] === "" ? null : record["failure"]!,
  };
}

function parseAggregate(
  record: Record<string, string>,
  line: number,
): AggregateRow {
  const values: Record<string, number> = {};
  for (const field of CSV_FIELDS) {
    if (
      field === "seed" ||
      field === "algo" ||
      field === "adversary" ||
      field === "failure"
    ) {
      continue;
    }
    values[field] = numberOrThrow(record[field]!, field, line);
  }
  return {
    label: record["seed"] as AggregateLabel,
    m: values["m"]!,
    algo: record["algo"]!,
    adversary: record["adversary"]!,
    values,
    failure: record["failure"] === "" ? null : record["failure"]!,
  };
}

export function parseSweepCsv(text: string): SweepTable {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const header = parsed.meta.fields ?? [];
  for (let i = 0; i < CSV_FIELDS.length; i++) {
    if (header[i] !== CSV_FIELDS[i]) {
      throw new SchemaError(
        CSV_FIELDS[i]!,
        `expected at header position ${i}, found "${header[i] ?? "<missing>"}"`,
      );
    }
  }
  if (header.length > CSV_FIELDS.length) {
    throw new SchemaError(
      header[CSV_FIELDS.length]!,
      "unexpected extra column",
    );
  }

  const trials: TrialRow[] = [];
  const aggregates: AggregateRow[] = [];
  parsed.data.forEach((record, i) => {
    const line = i + 2; // 1-based, after the header row
    const seed = record["seed"] ?? "";
    if ((AGGREGATE_LABELS as readonly string[]).includes(seed)) {
      aggregates.push(parseAggregate(record, line));
    } else {
      trials.push(parseTrial(record, line));
    }
  });
  return { trials, aggregates };
}

export function readSweepCsv(path: string): SweepTable {
  return parseSweepCsv(readFileSync(path, "utf8"));
}
