import { basename } from "path";
import type { EChartsOption, SeriesOption } from "echarts";

import { GRID_COLUMNS, Row, SchemaError, SWEEP_COLUMNS, TRACE_COLUMNS, numericColumn, readTable } from "./csv";

const PALETTE = ["#2f6fb2", "#c23531", "#61a0a8", "#91c7ae", "#749f83"];

/** Log-log energy decay curves with dashed power-law guide lines. */
export function decayOption(paths: string[], slopes: number[]): EChartsOption {
  if (paths.length === 0) {
    throw new SchemaError("decay figure needs at least one trace CSV");
  }
  const series: SeriesOption[] = [];
  let anchor: [number, number] | null = null;
  let tMax = 0;
  for (const path of paths) {
    const rows = readTable(path, TRACE_COLUMNS);
    const t = numericColumn(rows, "t", path);
    const e = numericColumn(rows, "E", path);
    const points: [number, number][] = [];
    for (let i = 0; i < t.length; i++) {
      if (t[i] > 0 && e[i] > 0) {
        points.push([t[i], e[i]]);
      }
    }
    if (points.length === 0) {
      throw new SchemaError(`${path}: no plottable samples with t > 0 and E > 0`);
    }
    if (anchor === null) {
      anchor = points[0];
    }
    tMax = Math.max(tMax, points[points.length - 1][0]);
    series.push({
      type: "line",
      name: basename(path),
      data: points,
      showSymbol: false,
      lineStyle: { width: 2 },
    });
  }
  const [t0, e0] = anchor as [number, number];
  for (const slope of slopes) {
    const guide: [number, number][] = [];
    for (let k = 0; k <= 64; k++) {
      const t = t0 * Math.pow(tMax / t0, k / 64);
      guide.push([t, e0 * Math.pow(t / t0, slope)]);
    }
    series.push({
      type: "line",
      name: `t^${slope}`,
      data: guide,
      showSymbol: false,
      lineStyle: { type: "dashed", width: 1, color: "#888" },
    });
  }
  return {
    color: PALETTE,
    animation: false,
    title: { text: "Energy decay", left: "center" },
    legend: { bottom: 0 },
    grid: { left: 70, right: 30, top: 50, bottom: 60 },
    xAxis: { type: "log", name: "t" },
    yAxis: { type: "log", name: "E(t)" },
    series,
  };
}

/** Heatmap of the pointwise multiplier-condition margin min(iii, iv) over (t, x). */
export function heatmapOption(path: string): EChartsOption {
  const rows = readTable(path, GRID_COLUMNS);
  if (rows.length === 0) {
    throw new SchemaError(`${path}: empty condition grid`);
  }
  const t = numericColumn(rows, "t", path);
  const x = numericColumn(rows, "x", path);
  const iii = numericColumn(rows, "cond_iii", path);
  const iv = numericColumn(rows, "cond_iv", path);

  const tValues = Array.from(new Set(t)).sort((a, b) => a - b);
  const xValues = Array.from(new Set(x)).sort((a, b) => a - b);
  const tIndex = new Map(tValues.map((v, i) => [v, i]));
  const xIndex = new Map(xValues.map((v, i) => [v, i]));

  const data: [number, number, number][] = [];
  let extent = 0;
  for (let i = 0; i < rows.length; i++) {
    const margin = Math.min(iii[i], iv[i]);
    extent = Math.max(extent, Math.abs(margin));
    data.push([xIndex.get(x[i]) as number, tIndex.get(t[i]) as number, margin]);
  }
  const label = (v: number) => (Math.abs(v) >= 100 ? v.toFixed(0) : v.toPrecision(3));
  return {
    animation: false,
    title: { text: "Multiplier condition margin min(iii, iv)", left: "center" },
    grid: { left: 80, right: 90, top: 50, bottom: 60 },
    xAxis: { type: "category", name: "x", data: xValues.map(label) },
    yAxis: { type: "category", name: "t", data: tValues.map(label) },
    visualMap: {
      min: -extent,
      max: extent,
      calculable: true,
      orient: "vertical",
      right: 10,
      top: "center",
      inRange: { color: ["#b2182b", "#f7f7f7", "#2166ac"] },
    },
    series: [{ type: "heatmap", data, progressive: 0 }],
  };
}

/** Fitted decay exponent against the swept parameter value. */
export function sweepOption(path: string): EChartsOption {
  const rows = readTable(path, SWEEP_COLUMNS);
  const ok: Row[] = rows.filter(
    (row) => row.status === "ok" || row.status === "check-failed"
  );
  if (ok.length === 0) {
    throw new SchemaError(`${path}: no successfully fitted sweep rows`);
  }
  const value = numericColumn(ok, "value", path);
  const alpha = numericColumn(ok, "alpha", path);
  const points = value
    .map((v, i) => [v, alpha[i]] as [number, number])
    .sort((a, b) => a[0] - b[0]);
  const parameter = String(ok[0].parameter);
  return {
    color: PALETTE,
    animation: false,
    title: { text: `Decay exponent vs ${parameter}`, left: "center" },
    grid: { left: 70, right: 30, top: 50, bottom: 60 },
    xAxis: { type: "value", name: parameter },
    yAxis: { type: "value", name: "alpha" },
    series: [{ type: "line", data: points, symbolSize: 8 }],
  };
}
