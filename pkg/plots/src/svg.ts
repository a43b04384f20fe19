/** Minimal SVG scaffolding: just enough for log-log curves and histograms. */

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
] as const;

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Map [lo, hi] in log10 space onto [rangeLo, rangeHi]. */
export function logScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
): (x: number) => number {
  const a = Math.log10(lo);
  const b = Math.log10(hi);
  const span = b === a ? 1 : b - a;
  return (x) => rangeLo + ((Math.log10(x) - a) / span) * (rangeHi - rangeLo);
}

export function linearScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
): (x: number) => number {
  const span = hi === lo ? 1 : hi - lo;
  return (x) => rangeLo + ((x - lo) / span) * (rangeHi - rangeLo);
}

const fmt = (v: number) => String(Math.round(v * 100) / 100);

export function polyline(
  pts: [number, number][],
  attrs: Record<string, string>,
): string {
  const d = pts
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
    .join(" ");
  const extra = Object.entries(attrs)
    .map(([k, v]) => `${k}="${esc(v)}"`)
    .join(" ");
  return `<path d="${d}" fill="none" ${extra}/>`;
}

/** Decade tick positions (1eK) covering [lo, hi]. */
export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(Math.log10(lo) - 1e-9); ; k++) {
    const v = Math.pow(10, k);
    if (v > hi * (1 + 1e-9)) {
      break;
    }
    if (v >= lo * (1 - 1e-9)) {
      ticks.push(v);
    }
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (v >= 1e4 || v < 1e-3) {
    const k = Math.round(Math.log10(v));
    return `1e${k}`;
  }
  return String(v);
}

export function svgDocument(
  width: number,
  height: number,
  body: string,
): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="sans-serif" font-size="12">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    `\n</svg>\n`
  );
}
