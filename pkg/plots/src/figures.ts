/**
 * The three figures.
 *
 * error_vs_m plots mean exact error against sample size on log-log axes,
 * one curve per (file, algorithm arm), with both fitted growth laws
 * overlaid as dashed lines. The fit coefficients come from the harness
 * summary, never from refitting here: the figure is a view of the file of
 * record, not a second analysis. The histograms are plain diagnostics over
 * trial rows.
 */

import { AggregateRow, TrialRow } from "./schema.js";
import { SweepSummary } from "./summary.js";
import {
  decadeTicks,
  esc,
  linearScale,
  logScale,
  PALETTE,
  polyline,
  svgDocument,
  tickLabel,
} from "./svg.js";

const W = 640;
const H = 440;
const M = { top: 24, right: 160, bottom: 48, left: 72 };

export interface ArmSeries {
  /** Legend label, e.g. "adaboost:on" or "ref.csv adaboost:on". */
  label: string;
  /** (m, mean exact_error) from the CSV's mean aggregate rows, m ascending. */
  points: [number, number][];
  /** Fit of record for this arm; gamma and d feed the fitted shape curves. */
  fit: { a_log: number; a_flat: number };
  gamma: number;
  d: number;
}

export function armKey(row: AggregateRow): string {
  return `${row.algo}:${row.adversary}`;
}

/** Mean-aggregate series per arm, in first-seen arm order. */
export function meanSeries(aggregates: AggregateRow[]): Map<string, [number, number][]> {
  const series = new Map<string, [number, number][]>();
  for (const row of aggregates) {
    if (row.label !== "mean") {
      continue;
    }
    const key = armKey(row);
    if (!series.has(key)) {
      series.set(key, []);
    }
    series.get(key)!.push([row.m, row.values["exact_error"]!]);
  }
  for (const pts of series.values()) {
    pts.sort((a, b) => a[0] - b[0]);
  }
  return series;
}

function logShape(m: number, gamma: number, d: number): number {
  const mg2 = m * gamma * gamma;
  return (d * Math.log(mg2 / d)) / mg2;
}

function flatShape(m: number, gamma: number, d: number): number {
  return d / (m * gamma * gamma);
}

function fitCurve(
  shape: (m: number, gamma: number, d: number) => number,
  a: number,
  arm: ArmSeries,
  mLo: number,
  mHi: number,
): [number, number][] {
  const pts: [number, number][] = [];
  const steps = 64;
  for (let i = 0; i <= steps; i++) {
    const m = mLo * Math.pow(mHi / mLo, i / steps);
    const v = a * shape(m, arm.gamma, arm.d);
    if (v > 0) {
      pts.push([m, v]);
    }
  }
  return pts;
}

export function renderErrorVsM(arms: ArmSeries[]): string {
  const allPts = arms.flatMap((a) => a.points).filter(([, e]) => e > 0);
  if (allPts.length === 0) {
    throw new Error("no positive mean errors to plot");
  }
  const ms = allPts.map(([m]) => m);
  const errs = allPts.map(([, e]) => e);
  const mLo = Math.min(...ms);
  const mHi = Math.max(...ms);
  const eLo = Math.min(...errs);
  const eHi = Math.max(...errs);
  const x = logScale(mLo, mHi, M.left, W - M.right);
  const y = logScale(eLo / 1.5, eHi * 1.5, H - M.bottom, M.top);

  const parts: string[] = [];
  parts.push(
    `<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - M.right}" ` +
      `y2="${H - M.bottom}" stroke="black"/>`,
    `<line x1="${M.left}" y1="${M.top}" x2="${M.left}" ` +
      `y2="${H - M.bottom}" stroke="black"/>`,
  );
  for (const t of decadeTicks(mLo, mHi)) {
    const px = x(t);
    parts.push(
      `<line x1="${px}" y1="${H - M.bottom}" x2="${px}" y2="${H - M.bottom + 5}" stroke="black"/>`,
      `<text x="${px}" y="${H - M.bottom + 18}" text-anchor="middle">${tickLabel(t)}</text>`,
    );
  }
  for (const t of decadeTicks(eLo / 1.5, eHi * 1.5)) {
    const py = y(t);
    parts.push(
      `<line x1="${M.left - 5}" y1="${py}" x2="${M.left}" y2="${py}" stroke="black"/>`,
      `<text x="${M.left - 8}" y="${py + 4}" text-anchor="end">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 10}" text-anchor="middle">m (sample size)</text>`,
    `<text x="16" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(M.top + H - M.bottom) / 2})">mean exact error</text>`,
  );

  arms.forEach((arm, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts = arm.points.filter(([, e]) => e > 0);
    parts.push(
      polyline(
        pts.map(([m, e]) => [x(m), y(e)] as [number, number]),
        { class: "curve", stroke: color, "stroke-width": "2" },
      ),
    );
    for (const [m, e] of pts) {
      parts.push(`<circle cx="${x(m)}" cy="${y(e)}" r="3" fill="${color}"/>`);
    }
    const logPts = fitCurve(logShape, arm.fit.a_log, arm, mLo, mHi);
    const flatPts = fitCurve(flatShape, arm.fit.a_flat, arm, mLo, mHi);
    if (logPts.length > 1) {
      parts.push(
        polyline(
          logPts.map(([m, e]) => [x(m), y(e)] as [number, number]),
          {
            class: "fit fit-log",
            stroke: color,
            "stroke-width": "1",
            "stroke-dasharray": "6 3",
          },
        ),
      );
    }
    if (flatPts.length > 1) {
      parts.push(
        polyline(
          flatPts.map(([m, e]) => [x(m), y(e)] as [number, number]),
          {
            class: "fit fit-flat",
            stroke: color,
            "stroke-width": "1",
            "stroke-dasharray": "2 3",
          },
        ),
      );
    }
    const ly = M.top + 16 * i;
    parts.push(
      `<line x1="${W - M.right + 10}" y1="${ly}" x2="${W - M.right + 34}" y2="${ly}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${W - M.right + 40}" y="${ly + 4}">${esc(arm.label)}</text>`,
    );
  });
  const ly = M.top + 16 * arms.length + 8;
  parts.push(
    `<text x="${W - M.right + 10}" y="${ly + 4}" fill="#555">dashed: a·d·ln(mγ²/d)/(mγ²)</text>`,
    `<text x="${W - M.right + 10}" y="${ly + 20}" fill="#555">dotted: a·d/(mγ²)</text>`,
  );
  return svgDocument(W, H, parts.join("\n"));
}

export function renderHistogram(
  values: number[],
  title: string,
  xLabel: string,
): string {
  const bins = 20;
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    // fraction-valued diagnostics live in [0, 1]; clamp guards float spill
    const b = Math.min(bins - 1, Math.max(0, Math.floor(v * bins)));
    counts[b]!++;
  }
  const peak = Math.max(1, ...counts);
  const x = linearScale(0, 1, M.left, W - 40);
  const y = linearScale(0, peak, H - M.bottom, M.top);

  const parts: string[] = [];
  parts.push(
    `<text x="${W / 2}" y="16" text-anchor="middle" font-size="14">${esc(title)}</text>`,
    `<line x1="${M.left}" y1="${H - M.bottom}" x2="${W - 40}" y2="${H - M.bottom}" stroke="black"/>`,
    `<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${H - M.bottom}" stroke="black"/>`,
  );
  for (let i = 0; i <= 5; i++) {
    const v = i / 5;
    parts.push(
      `<line x1="${x(v)}" y1="${H - M.bottom}" x2="${x(v)}" y2="${H - M.bottom + 5}" stroke="black"/>`,
      `<text x="${x(v)}" y="${H - M.bottom + 18}" text-anchor="middle">${v}</text>`,
    );
  }
  const yTicks = Math.min(peak, 8);
  for (let i = 0; i <= yTicks; i++) {
    const v = Math.round((peak * i) / yTicks);
    parts.push(
      `<line x1="${M.left - 5}" y1="${y(v)}" x2="${M.left}" y2="${y(v)}" stroke="black"/>`,
      `<text x="${M.left - 8}" y="${y(v) + 4}" text-anchor="end">${v}</text>`,
    );
  }
  counts.forEach((c, b) => {
    if (c === 0) {
      return;
    }
    const x0 = x(b / bins);
    const x1 = x((b + 1) / bins);
    parts.push(
      `<rect class="bar" x="${x0}" y="${y(c)}" width="${x1 - x0 - 1}" ` +
        `height="${H - M.bottom - y(c)}" fill="#1f77b4"/>`,
    );
  });
  parts.push(
    `<text x="${(M.left + W - 40) / 2}" y="${H - 10}" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="16" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(M.top + H - M.bottom) / 2})">trials</text>`,
  );
  return svgDocument(W, H, parts.join("\n"));
}

export function histogramValues(
  trials: TrialRow[],
  field: "h0Weight" | "frsMinusFraction",
): number[] {
  return trials.filter((t) => t.failure === null).map((t) => t[field]);
}

export function armSeriesFor(
  fileLabel: string,
  prefixLabels: boolean,
  aggregates: AggregateRow[],
  summary: SweepSummary,
): ArmSeries[] {
  const series = meanSeries(aggregates);
  const arms: ArmSeries[] = [];
  for (const [key, points] of series) {
    const fit = summary.fits[key];
    if (fit === undefined) {
      throw new Error(`summary has no fit for arm "${key}"`);
    }
    arms.push({
      label: prefixLabels ? `${fileLabel} ${key}` : key,
      points,
      fit: { a_log: fit.a_log, a_flat: fit.a_flat },
      gamma: summary.spec.gamma,
      d: summary.spec.d,
    });
  }
  return arms;
}
