/** The three plot jobs.
 *
 * trace_decay      energy-distance series on a log scale, overlaid with the
 *                  Gronwall envelope rebuilt from the summary scalars (the
 *                  envelope is never read from a plotted column), caption
 *                  carries the least-squares log-slope of the data;
 * sweep            final H1 gap against node density with the density
 *                  threshold marked;
 * ratio_histogram  distribution of inequality check ratios (lhs / rhs).
 *
 * Jobs read their inputs and write one image; they never modify inputs.
 */

import { writeFileSync } from "fs";

import { CsvError, finiteRows, readCsv, requireColumns, Table } from "./csv";
import { logSlopeFit } from "./fit";
import { readSummary, summaryNumber } from "./summary";
import { Chart } from "./svg";

export const JOB_KINDS = ["trace_decay", "sweep", "ratio_histogram"] as const;
export type JobKind = (typeof JOB_KINDS)[number];

export interface PlotJob {
  kind: JobKind;
  inputs: string[];
  summary?: string;
  output: string;
}

export interface JobResult {
  output: string;
  /** log-slope of the first trace (trace_decay only) */
  slope?: number;
  rows: number;
}

const SERIES_COLORS = ["#1f6fb2", "#2a9d8f", "#b26f1f", "#6a4c93"];
const FLOOR = 1e-300;

export function runJob(job: PlotJob): JobResult {
  if (!JOB_KINDS.includes(job.kind)) {
    throw new Error(`unknown job kind '${job.kind}' (expected ${JOB_KINDS.join("|")})`);
  }
  if (job.inputs.length === 0) {
    throw new Error("no input CSVs given");
  }
  switch (job.kind) {
    case "trace_decay":
      return traceDecay(job);
    case "sweep":
      return sweepPlot(job);
    case "ratio_histogram":
      return ratioHistogram(job);
  }
}

function gronwallEnvelope(y0: number, lam: number, eps: number, dt: number): number {
  const decay = Math.exp(-lam * dt);
  return y0 * decay + (eps / lam) * (1 - decay);
}

function traceDecay(job: PlotJob): JobResult {
  const tables = job.inputs.map(readCsv);
  const series = tables.map((table) => {
    const rows = finiteRows(table, ["t", "w_a_sq"]);
    if (rows.length === 0) throw new CsvError("no usable rows in trace CSV");
    const [t, w] = requireColumns(table, ["t", "w_a_sq"]);
    return {
      t: rows.map((i) => t[i]),
      w: rows.map((i) => Math.max(w[i], FLOOR)),
    };
  });

  const fit = logSlopeFit(series[0].t, series[0].w);
  const caption = `log-slope fit: ${fit.slope.toPrecision(12)} per unit time (${fit.rowsUsed} rows)`;

  const allT = series.flatMap((s) => s.t);
  const allW = series.flatMap((s) => s.w);
  const positive = allW.filter((v) => v > FLOOR);
  const wMin = Math.min(...positive);
  const wMax = Math.max(...positive);

  let envelope: { t: number[]; w: number[] } | undefined;
  let envLabel = "";
  if (job.summary) {
    const summary = readSummary(job.summary);
    const lam = summaryNumber(summary, "result_lambda");
    const eps = summaryNumber(summary, "result_h_tail_eps") ?? 0;
    if (lam !== undefined && lam > 0) {
      const { t, w } = series[0];
      envelope = {
        t,
        w: t.map((ti) => Math.max(gronwallEnvelope(w[0], lam, eps, ti - t[0]), FLOOR)),
      };
      envLabel = `envelope: rate ${lam.toPrecision(6)}, eps ${eps.toExponential(2)}`;
    }
  }

  const chart = new Chart(
    { min: Math.min(...allT), max: Math.max(...allT) },
    { min: wMin, max: Math.max(wMax, ...(envelope ? envelope.w : [wMin])) },
    "linear",
    "log",
  );
  series.forEach((s, i) => chart.polyline(s.t, s.w, SERIES_COLORS[i % SERIES_COLORS.length]));
  if (envelope) {
    chart.polyline(envelope.t, envelope.w, "#c1272d", "5,3");
    chart.legend([
      { label: "squared energy distance", color: SERIES_COLORS[0] },
      { label: envLabel, color: "#c1272d" },
    ]);
  }
  const svg = chart.render("energy distance decay", "t", "squared energy norm", caption);
  writeFileSync(job.output, svg);
  return { output: job.output, slope: fit.slope, rows: series[0].t.length };
}

function sweepPlot(job: PlotJob): JobResult {
  const points: Array<{ d: number; h1: number }> = [];
  for (const table of job.inputs.map(readCsv)) {
    const rows = finiteRows(table, ["d_n", "final_h1"]);
    const [d, h1] = requireColumns(table, ["d_n", "final_h1"]);
    rows.forEach((i) => points.push({ d: d[i], h1: Math.max(h1[i], FLOOR) }));
  }
  if (points.length === 0) {
    throw new CsvError("no completed sweep rows to plot");
  }
  points.sort((a, b) => a.d - b.d);

  const chart = new Chart(
    { min: Math.min(...points.map((p) => p.d)), max: Math.max(...points.map((p) => p.d)) },
    { min: Math.min(...points.map((p) => p.h1)), max: Math.max(...points.map((p) => p.h1)) },
    "log",
    "log",
  );
  chart.polyline(points.map((p) => p.d), points.map((p) => p.h1), SERIES_COLORS[0]);
  chart.circles(points.map((p) => p.d), points.map((p) => p.h1), SERIES_COLORS[0]);
  let caption = `${points.length} sweep rows`;
  if (job.summary) {
    const delta = summaryNumber(readSummary(job.summary), "result_delta3");
    if (delta !== undefined) {
      chart.vline(delta, "#c1272d", "density threshold");
      caption += `; threshold ${delta.toExponential(3)}`;
    }
  }
  const svg = chart.render("final gap vs node density", "node density", "final H1 gap", caption);
  writeFileSync(job.output, svg);
  return { output: job.output, rows: points.length };
}

function ratioHistogram(job: PlotJob): JobResult {
  const ratios: number[] = [];
  for (const table of job.inputs.map(readCsv)) {
    const rows = finiteRows(table, ["lhs", "rhs"]);
    const [lhs, rhs] = requireColumns(table, ["lhs", "rhs"]);
    rows.forEach((i) => {
      if (rhs[i] > 0) ratios.push(lhs[i] / rhs[i]);
    });
  }
  if (ratios.length === 0) {
    throw new CsvError("no usable ratio rows to plot");
  }
  const lo = Math.min(...ratios);
  const hi = Math.max(...ratios);
  const nBins = 30;
  const width = (hi - lo) / nBins || 1;
  const counts = new Array<number>(nBins).fill(0);
  for (const r of ratios) {
    const bin = Math.min(nBins - 1, Math.floor((r - lo) / width));
    counts[bin] += 1;
  }

  const chart = new Chart(
    { min: lo, max: lo + width * nBins },
    { min: 0, max: Math.max(...counts) },
    "linear",
    "linear",
  );
  counts.forEach((c, i) => {
    if (c > 0) chart.bar(lo + i * width, lo + (i + 1) * width, c, SERIES_COLORS[0]);
  });
  const caption = `${ratios.length} checks, max ratio ${hi.toPrecision(4)}`;
  const svg = chart.render("inequality tightness", "lhs / rhs", "count", caption);
  writeFileSync(job.output, svg);
  return { output: job.output, rows: ratios.length };
}
