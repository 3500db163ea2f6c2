// Chart series assembly: trace JSON in, step-aligned point lists out. Point
// values are copied from the trace verbatim; only coordinates are computed
// here, so every plotted number is a server number.

import type { TraceDoc, TraceStepDoc } from "./api";

export interface SeriesPoint {
  step: number;
  value: number;
}

export interface ChartSeries {
  session: string;
  key: string;
  label: string;
  color: string;
  dashed: boolean;
  points: SeriesPoint[];
}

const PALETTE = [
  "#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed",
  "#db2777", "#0891b2", "#65a30d", "#9333ea", "#b45309",
];

export function keyColor(key: string, order: string[]): string {
  let idx = order.indexOf(key);
  if (idx < 0) idx = order.length;
  return PALETTE[idx % PALETTE.length];
}

/** Shorten a canonical key for legends; falls back to the raw text. */
export function prettyKey(key: string): string {
  let m = /^cssm\(([^,]+),([^,]+),([^,]+),([^,]+),([^)]+)\)$/.exec(key);
  if (m) {
    const [, , metric, subject, perspective, estimator] = m;
    const by = estimator === subject ? "" : ` (${estimator})`;
    return `${metric} ${subject}/${perspective}${by}`;
  }
  m = /^cb\(([^,]+),([^,]+),([^)]+)\)$/.exec(key);
  if (m) {
    const [, question, perspective, estimator] = m;
    const by = estimator === perspective ? "" : ` (${estimator})`;
    return `${question} ${perspective}${by}`;
  }
  return key;
}

function fmtArg(value: number): string {
  return String(value);
}

/** X tick text for one step, e.g. "α10(x=0.9 y=1)". */
export function actionLabel(step: TraceStepDoc, displayOf: (id: string) => string): string {
  const args = Object.entries(step.args)
    .map(([name, value]) => `${name}=${fmtArg(value)}`)
    .join(" ");
  const name = displayOf(step.action);
  return args ? `${name}(${args})` : name;
}

/** Step-aligned values for one key: index 0 is the pre-action snapshot. */
export function seriesValues(trace: TraceDoc, key: string): number[] {
  const idx = trace.keys.findIndex((k) => k.key === key || k.label === key);
  if (idx < 0) throw new Error(`key ${key} not in trace`);
  return [trace.initial.values[idx], ...trace.steps.map((s) => s.values[idx])];
}

export function buildSeries(session: string, dashed: boolean, trace: TraceDoc,
                            keys: string[], colorOrder: string[]): ChartSeries[] {
  return keys.map((key) => ({
    session,
    key,
    label: `${prettyKey(key)} [${session}]`,
    color: keyColor(key, colorOrder),
    dashed,
    points: seriesValues(trace, key).map((value, step) => ({ step, value })),
  }));
}

/** Per-step axis labels across overlaid traces; divergent steps join with a slash. */
export function xAxisLabels(traces: TraceDoc[], displayOf: (id: string) => string): string[] {
  const maxSteps = Math.max(0, ...traces.map((t) => t.steps.length));
  const labels = ["start"];
  for (let i = 0; i < maxSteps; i++) {
    const here: string[] = [];
    for (const trace of traces) {
      const step = trace.steps[i];
      if (!step) continue;
      const text = actionLabel(step, displayOf);
      if (!here.includes(text)) here.push(text);
    }
    labels.push(here.join(" / "));
  }
  return labels;
}

export interface LayoutPoint {
  x: number;
  y: number;
  step: number;
  value: number;
}

export interface LayoutSeries {
  session: string;
  key: string;
  label: string;
  color: string;
  dashed: boolean;
  path: LayoutPoint[];
}

export interface ChartLayout {
  width: number;
  height: number;
  series: LayoutSeries[];
  xTicks: Array<{ x: number; step: number; label: string }>;
  yTicks: Array<{ y: number; label: string }>;
}

const MARGIN = { left: 56, right: 14, top: 12, bottom: 64 };

export function layoutChart(seriesList: ChartSeries[], xLabels: string[],
                            width = 860, height = 330): ChartLayout {
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const maxStep = Math.max(1, xLabels.length - 1);

  let lo = Infinity;
  let hi = -Infinity;
  for (const s of seriesList) {
    for (const p of s.points) {
      if (p.value < lo) lo = p.value;
      if (p.value > hi) hi = p.value;
    }
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;

  const px = (step: number) => MARGIN.left + (step / maxStep) * innerW;
  const py = (value: number) => MARGIN.top + ((hi - value) / (hi - lo)) * innerH;

  const series = seriesList.map((s) => ({
    session: s.session,
    key: s.key,
    label: s.label,
    color: s.color,
    dashed: s.dashed,
    path: s.points.map((p) => ({ x: px(p.step), y: py(p.value),
                                 step: p.step, value: p.value })),
  }));

  const xTicks = xLabels.map((label, step) => ({ x: px(step), step, label }));

  const yTicks = [];
  for (let i = 0; i <= 4; i++) {
    const value = lo + ((hi - lo) * i) / 4;
    yTicks.push({ y: py(value), label: value.toPrecision(3) });
  }

  return { width, height, series, xTicks, yTicks };
}
