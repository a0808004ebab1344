/** Data preparation for the three time-based charts and their shared cursor.
 *
 * The phenotype chart plots every observable; the two rule charts plot the
 * selected rule's incoming and outgoing influence series, the self series in
 * red and all others in gray. Values are plotted exactly as served; gaps
 * (nulls) break the line.
 */

import type { Observables, SeriesPayload, WindowPayload } from "./types.js";

export const SELF_COLOR = "#d62728";
export const OTHER_COLOR = "#9a9a9a";
export const PHENO_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

export interface ChartLine {
  id: string;
  color: string;
  /** Sorted by time; null values are gaps. */
  points: { t: number; v: number | null }[];
  emphasized: boolean;
}

export function phenotypeLines(obs: Observables): ChartLine[] {
  return obs.names.map((name, j) => ({
    id: name,
    color: PHENO_PALETTE[j % PHENO_PALETTE.length]!,
    points: obs.times.map((t, i) => ({ t, v: obs.values[i]![j]! })),
    emphasized: false,
  }));
}

/** Window midpoints carry the per-window influence values on the time axis. */
export function windowTimes(windows: WindowPayload[]): number[] {
  return windows.map((w) => (w.t_start + w.t_end) / 2);
}

function influenceLines(
  byRule: Record<string, (number | null)[]>,
  self: (number | null)[],
  selfRule: number,
  times: number[],
): ChartLine[] {
  const lines: ChartLine[] = [];
  for (const [rule, series] of Object.entries(byRule)) {
    if (Number(rule) === selfRule) continue; // drawn via the red self line
    lines.push({
      id: `rule ${rule}`,
      color: OTHER_COLOR,
      points: times.map((t, i) => ({ t, v: series[i] ?? null })),
      emphasized: false,
    });
  }
  lines.push({
    id: "self",
    color: SELF_COLOR,
    points: times.map((t, i) => ({ t, v: self[i] ?? null })),
    emphasized: true,
  });
  return lines;
}

export function incomingLines(series: SeriesPayload, times: number[]): ChartLine[] {
  return influenceLines(series.incoming, series.self, series.rule, times);
}

export function outgoingLines(series: SeriesPayload, times: number[]): ChartLine[] {
  return influenceLines(series.outgoing, series.self, series.rule, times);
}

/** The dashed cursor sits at the current window's start time. */
export function cursorTime(windows: WindowPayload[], windowIndex: number): number {
  if (windows.length === 0) return 0;
  const k = Math.min(Math.max(Math.floor(windowIndex), 0), windows.length - 1);
  return windows[k]!.t_start;
}

/** Clip lines to a zoom range; all three charts share the same range. */
export function clipLines(lines: ChartLine[], t0: number, t1: number): ChartLine[] {
  return lines.map((line) => ({
    ...line,
    points: line.points.filter((p) => p.t >= t0 && p.t <= t1),
  }));
}

export interface LinearScale {
  domain: [number, number];
  range: [number, number];
  apply(x: number): number;
  invert(y: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    range,
    apply: (x) => r0 + ((x - d0) / span) * (r1 - r0),
    invert: (y) => d0 + ((y - r0) / (r1 - r0 || 1)) * span,
  };
}

export function valueExtent(lines: ChartLine[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const line of lines) {
    for (const p of line.points) {
      if (p.v === null) continue;
      lo = Math.min(lo, p.v);
      hi = Math.max(hi, p.v);
    }
  }
  if (lo > hi) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

/** Exact served value under the pointer: nearest point on one line. */
export function hoverValue(
  line: ChartLine,
  t: number,
): { t: number; v: number } | null {
  let best: { t: number; v: number } | null = null;
  let bestDist = Infinity;
  for (const p of line.points) {
    if (p.v === null) continue;
    const d = Math.abs(p.t - t);
    if (d < bestDist) {
      bestDist = d;
      best = { t: p.t, v: p.v };
    }
  }
  return best;
}
