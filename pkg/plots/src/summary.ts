/**
 * Harness summary JSON access.
 *
 * The summary next to each sweep CSV holds the fitted growth-law
 * coefficients of record. Figures must echo those numbers exactly as
 * written, so alongside normal JSON parsing this module extracts the raw
 * text of the "fits" object: re-serializing floats in another language
 * changes their spelling (5e-05 versus 0.00005), and a byte-level echo is
 * the only representation guaranteed to match the file of record.
 */

import { readFileSync } from "fs";

export interface FitReport {
  a_log: number;
  a_flat: number;
  ssr_log: number;
  ssr_flat: number;
  preferred: "log" | "flat";
  points: [number, number][];
}

export interface SweepSummary {
  spec: {
    gamma: number;
    d: number;
    alpha: number;
    m_grid: number[];
    trials: number;
    algorithms: string[];
    seed: number;
  };
  fits: Record<string, FitReport>;
  largest_m_ratio: number | null;
  master_seed: number;
}

/** Summary path rule used by the harness: strip .csv, append .summary.json. */
export function summaryPathFor(csvPath: string): string {
  const base = csvPath.endsWith(".csv") ? csvPath.slice(0, -4) : csvPath;
  return base + ".summary.json";
}

/**
 * Return the verbatim text of the value of `"fits":` in a JSON document,
 * from its opening brace to the matching closing brace inclusive.
 * String-aware so braces inside quoted keys cannot derail the match.
 */
export function extractFitsText(jsonText: string): string {
  const keyAt = jsonText.indexOf('"fits"');
  if (keyAt < 0) {
    throw new Error('summary JSON has no "fits" key');
  }
  const start = jsonText.indexOf("{", keyAt);
  if (start < 0) {
    throw new Error('"fits" is not an object');
  }
  let depth = 0;
  let inString = false;
  for (let i = start; i < jsonText.length; i++) {
    const ch = jsonText[i];
    if (inString) {
      if (ch === "\\") {
        i++;
      } else if (ch === '"') {
        inString = false;
      }
    } else if (ch === '"') {
      inString = true;
    } else if (ch === "{") {
      depth++;
    } else if (ch === "}") {
      depth--;
      if (depth === 0) {
        return jsonText.slice(start, i + 1);
      }
    }
  }
  throw new Error('"fits" object is not closed');
}

export interface LoadedSummary {
  parsed: SweepSummary;
  /** Raw bytes of the fits object, for verbatim echoing. */
  fitsText: string;
}

export function readSummary(path: string): LoadedSummary {
  const text = readFileSync(path, "utf8");
  return { parsed: JSON.parse(text) as SweepSummary, fitsText: extractFitsText(text) };
}
