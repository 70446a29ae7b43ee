import * as fs from "fs";

import { MissingInput, SchemaMismatch, numericTable } from "./csv";
import { HEIGHT, MARGIN, Scale, Svg, WIDTH, linearScale, tickLabel } from "./svg";

const FUNCTIONAL_COLUMNS = ["xi", "V", "Q_A", "Q_b", "G", "Phi", "L1"];
const SWEEP_COLUMNS = ["delta_coarse", "delta_fine", "l1"];
const BOUNDARY_COLUMNS = ["x", "g"];
const REGION_COLUMNS = ["slab", "band", "x0", "x1", "y0_lo", "y0_hi",
  "y1_lo", "y1_hi", "u", "v", "p", "rho", "b"];

function plotArea(): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: MARGIN.left, x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom, y1: MARGIN.top,
  };
}

function span(values: number[]): [number, number] {
  const finite = values.filter(Number.isFinite);
  if (finite.length === 0) return [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function captionLines(metadataPath?: string): string[] {
  if (!metadataPath) return [];
  if (!fs.existsSync(metadataPath)) {
    throw new MissingInput(`metadata file not found: ${metadataPath}`);
  }
  const meta = JSON.parse(fs.readFileSync(metadataPath, "utf8"));
  const w = meta.weights ?? {};
  const num = (x: unknown) =>
    typeof x === "number" ? x.toPrecision(5) : "n/a";
  return [
    `calibration: k_plus=${num(w.k_plus)} k_two=${num(w.k_two)} ` +
    `kappa=${num(w.kappa)} kappa1=${num(w.kappa1)} kappa2=${num(w.kappa2)}`,
    `c_a=${Array.isArray(w.c_a) ? w.c_a.map(num).join("/") : "n/a"} ` +
    `lam_hat=${num(w.lam_hat)} delta=${num(meta.delta)} seed=${meta.seed}`,
  ];
}

const SERIES_COLORS = ["#c0392b", "#2471a3", "#1e8449", "#8e44ad"];

function lineChart(title: string, xs: number[],
                   series: Array<[string, number[]]>,
                   xLabel: string, yLabel: string,
                   caption: string[]): string {
  const svg = new Svg(title);
  const area = plotArea();
  const sx = linearScale(...span(xs), area.x0, area.x1);
  const ys = series.flatMap(([, v]) => v);
  const sy = linearScale(...span(ys), area.y0, area.y1);
  svg.axes(sx, sy, xLabel, yLabel);
  series.forEach(([label, values], k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    const pts: Array<[number, number]> = [];
    xs.forEach((x, i) => {
      if (Number.isFinite(values[i])) pts.push([sx(x), sy(values[i])]);
    });
    svg.polyline(pts, color);
    pts.forEach(([px, py]) => svg.circle(px, py, 2.2, color));
  });
  svg.legend(series.map(([label], k) =>
    [label, SERIES_COLORS[k % SERIES_COLORS.length]]));
  svg.caption(caption);
  return svg.render();
}

export function functionalDecay(functionals: string,
                                metadata?: string): string {
  const rows = numericTable(functionals, FUNCTIONAL_COLUMNS, ["Phi", "L1"]);
  const xs = rows.map((r) => r[0]);
  const series: Array<[string, number[]]> = [
    ["G", rows.map((r) => r[4])],
    ["V", rows.map((r) => r[1])],
  ];
  if (rows.some((r) => Number.isFinite(r[5]))) {
    series.push(["Phi", rows.map((r) => r[5])]);
  }
  return lineChart("Functional decay", xs, series, "xi", "value",
                   captionLines(metadata));
}

export function stabilityRatio(stability: string,
                               metadata?: string): string {
  const rows = numericTable(stability, FUNCTIONAL_COLUMNS, ["Phi", "L1"]);
  if (!rows.length) {
    throw new SchemaMismatch(`${stability}: no data rows`);
  }
  const xs = rows.map((r) => r[0]);
  const l1 = rows.map((r) => r[6]);
  const phi = rows.map((r) => r[5]);
  const ratio = (vals: number[]) => {
    const base = vals[0];
    if (!Number.isFinite(base) || base === 0) return vals.map(() => 0);
    return vals.map((v) => v / base);
  };
  return lineChart("L1 stability ratios", xs,
                   [["L1(xi)/L1(0)", ratio(l1)], ["Phi(xi)/Phi(0)", ratio(phi)]],
                   "xi", "ratio", captionLines(metadata));
}

export function deltaConvergence(sweep: string, metadata?: string): string {
  const rows = numericTable(sweep, SWEEP_COLUMNS);
  if (!rows.length) {
    throw new SchemaMismatch(`${sweep}: no data rows`);
  }
  const xs = rows.map((r) => Math.log10(r[0]));
  const ys = rows.map((r) => (r[2] > 0 ? Math.log10(r[2]) : NaN));
  const svg = new Svg("Accuracy refinement");
  const area = plotArea();
  const sx = linearScale(...span(xs), area.x0, area.x1);
  const sy = linearScale(...span(ys), area.y0, area.y1);
  const pow = (v: number) => `1e${v.toFixed(1)}`;
  svg.axes(sx, sy, "delta (log10)", "pairwise L1 (log10)", pow, pow);
  const pts: Array<[number, number]> = [];
  xs.forEach((x, i) => {
    if (Number.isFinite(ys[i])) pts.push([sx(x), sy(ys[i])]);
  });
  svg.polyline(pts, SERIES_COLORS[1]);
  pts.forEach(([px, py]) => svg.circle(px, py, 3, SERIES_COLORS[1]));
  svg.caption(captionLines(metadata));
  return svg.render();
}

function pressureColor(p: number, lo: number, hi: number): string {
  const t = hi > lo ? (p - lo) / (hi - lo) : 0.5;
  const r = Math.round(235 - 90 * t);
  const g = Math.round(240 - 130 * t);
  const b = Math.round(255 - 30 * t);
  return `rgb(${r},${g},${b})`;
}

export function eulerianPicture(regions: string, boundary: string,
                                metadata?: string): string {
  const bands = numericTable(regions, REGION_COLUMNS, [], ["b"]);
  const verts = numericTable(boundary, BOUNDARY_COLUMNS);
  if (!bands.length || !verts.length) {
    throw new SchemaMismatch("empty physical-plane artifacts");
  }
  const flow = bands.filter((r) => r[1] >= 0);
  const xsAll = bands.flatMap((r) => [r[2], r[3]]);
  const ysAll = bands.flatMap((r) => [r[4], r[5], r[6], r[7]]);
  const svg = new Svg("Physical plane: free boundary and wave pattern");
  const area = plotArea();
  const sx = linearScale(...span(xsAll), area.x0, area.x1);
  const sy = linearScale(...span(ysAll), area.y0, area.y1);
  svg.axes(sx, sy, "x", "y");
  const [pLo, pHi] = span(flow.map((r) => r[10]));
  for (const r of bands) {
    const [x0, x1] = [r[2], r[3]];
    const quad: Array<[number, number]> = [
      [sx(x0), sy(r[4])], [sx(x0), sy(r[5])],
      [sx(x1), sy(r[7])], [sx(x1), sy(r[6])],
    ];
    const fill = r[1] < 0 ? "#d5d8dc" : pressureColor(r[10], pLo, pHi);
    svg.polygon(quad, fill, "#7f8c8d");
  }
  svg.polyline(verts.map((r) => [sx(r[0]), sy(r[1])]), "#111", 2.5);
  svg.caption([
    `pressure range ${tickLabel(pLo)} .. ${tickLabel(pHi)}; grey block is ` +
    "the static gas below the free boundary",
    ...captionLines(metadata),
  ]);
  return svg.render();
}
