/**
 * Batch rendering: sweep CSV(s) in, SVG figures plus a fit-coefficient
 * echo out. Inputs are never written to; outputs carry no timestamps or
 * other run-dependent bytes, so re-rendering the same inputs reproduces
 * the same files exactly.
 */

import { mkdirSync, writeFileSync } from "fs";
import { basename, join } from "path";

import {
  armSeriesFor,
  ArmSeries,
  histogramValues,
  renderErrorVsM,
  renderHistogram,
} from "./figures.js";
import { readSweepCsv, SweepTable } from "./schema.js";
import { LoadedSummary, readSummary, summaryPathFor } from "./summary.js";

export const FIGURE_NAMES = ["error_vs_m", "h0_hist", "frs_hist"] as const;

export type FigureName = (typeof FIGURE_NAMES)[number];

export interface PlotJob {
  /** Sweep CSV paths; each must have its .summary.json sibling. */
  inputs: string[];
  outDir: string;
  figures: FigureName[];
}

/** Raised when a CSV of record has no aggregate rows to plot. */
export class EmptyAggregatesError extends Error {
  constructor(path: string) {
    super(`no aggregates in ${path}`);
    this.name = "EmptyAggregatesError";
  }
}

interface LoadedInput {
  path: string;
  base: string;
  table: SweepTable;
  summary: LoadedSummary;
}

export interface RenderResult {
  written: string[];
}

export function render(job: PlotJob): RenderResult {
  if (job.inputs.length === 0) {
    throw new Error("no input CSVs given");
  }
  for (const fig of job.figures) {
    if (!FIGURE_NAMES.includes(fig)) {
      throw new Error(`unknown figure "${fig}"`);
    }
  }
  const loaded: LoadedInput[] = job.inputs.map((path) => ({
    path,
    base: basename(path),
    table: readSweepCsv(path),
    summary: readSummary(summaryPathFor(path)),
  }));

  mkdirSync(job.outDir, { recursive: true });
  const written: string[] = [];
  const emit = (name: string, content: string) => {
    const target = join(job.outDir, name);
    writeFileSync(target, content);
    written.push(target);
  };

  if (job.figures.includes("error_vs_m")) {
    const prefix = loaded.length > 1;
    const arms: ArmSeries[] = [];
    for (const input of loaded) {
      if (!input.table.aggregates.some((row) => row.label === "mean")) {
        throw new EmptyAggregatesError(input.path);
      }
      arms.push(
        ...armSeriesFor(
          input.base,
          prefix,
          input.table.aggregates,
          input.summary.parsed,
        ),
      );
    }
    emit("error_vs_m.svg", renderErrorVsM(arms));
  }

  const pooledTrials = loaded.flatMap((input) => input.table.trials);
  if (job.figures.includes("h0_hist")) {
    emit(
      "h0_hist.svg",
      renderHistogram(
        histogramValues(pooledTrials, "h0Weight"),
        "Anchor hypothesis weight",
        "h0_weight",
      ),
    );
  }
  if (job.figures.includes("frs_hist")) {
    emit(
      "frs_hist.svg",
      renderHistogram(
        histogramValues(pooledTrials, "frsMinusFraction"),
        "Minus fraction on the planted block",
        "frs_minus_fraction",
      ),
    );
  }

  // fits echoed verbatim from each summary, keyed by CSV basename
  const entries = loaded.map(
    (input) => `  ${JSON.stringify(input.base)}: ${input.summary.fitsText}`,
  );
  emit("fit_summary.json", "{\n" + entries.join(",\n") + "\n}\n");
  return { written };
}
