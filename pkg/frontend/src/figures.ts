/**
 * Figure kinds rendered from the CLI's CSV outputs.
 *
 * - overlay:   detector samples with reference / thresholded columns
 * - sweep:     relative errors versus projection angle
 * - threshold: error rates and sparsity versus hard threshold (two panels)
 * - heatmap:   reconstruction grid plus optional error panel
 */

import { writeFileSync } from "node:fs";
import { column, readGrid, readTable } from "./csv.js";
import {
  SERIES_COLORS,
  axes,
  colorbar,
  extent,
  heatmapCells,
  legend,
  linearScale,
  logScale,
  polyline,
  svgDocument,
} from "./svg.js";

export type FigureKind = "overlay" | "sweep" | "threshold" | "heatmap";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
}

const FRAME = { x: 60, y: 30, width: 500, height: 320 };

function renderOverlay(spec: FigureSpec): string {
  const table = readTable(spec.inputs[0]);
  const y = column(table, "y");
  const seriesNames = table.header.filter((h) => h !== "y");
  if (seriesNames.length === 0) {
    throw new Error("overlay input has no value columns");
  }
  const all = seriesNames.flatMap((name) => column(table, name));
  const sx = linearScale(extent(y), [FRAME.x, FRAME.x + FRAME.width]);
  const sy = linearScale(extent(all), [FRAME.y + FRAME.height, FRAME.y]);
  // Draw the reference first so the slice-equation curves sit on top.
  const order = [...seriesNames].sort(
    (a, b) => Number(b === "reference") - Number(a === "reference"),
  );
  const dashes: Record<string, string> = { thresholded: "6 3", reference: "" };
  const body = [
    axes(FRAME, sx, sy, "detector coordinate", "projected value"),
    ...order.map((name, i) =>
      polyline(y, column(table, name), sx, sy, SERIES_COLORS[i % SERIES_COLORS.length], 1.6, dashes[name] ?? ""),
    ),
    legend(FRAME, order, SERIES_COLORS, order.map((n) => dashes[n] ?? "")),
  ].join("\n");
  return svgDocument(640, 420, body, spec.title ?? "projection overlay");
}

function renderSweep(spec: FigureSpec): string {
  const table = readTable(spec.inputs[0]);
  const deg = column(table, "theta_deg");
  const metrics = ["l1", "l2", "linf"].filter((m) => table.columns.has(m));
  if (metrics.length === 0) {
    throw new Error("sweep input has no error columns (l1/l2/linf)");
  }
  const all = metrics.flatMap((m) => column(table, m));
  const sx = linearScale(extent(deg), [FRAME.x, FRAME.x + FRAME.width]);
  const sy = logScale(extent(all), [FRAME.y + FRAME.height, FRAME.y]);
  const body = [
    axes(FRAME, sx, sy, "projection direction (degrees)", "relative error", { yLog: true }),
    ...metrics.map((m, i) => polyline(deg, column(table, m), sx, sy, SERIES_COLORS[i])),
    legend(FRAME, metrics, SERIES_COLORS),
  ].join("\n");
  return svgDocument(640, 420, body, spec.title ?? "error versus direction");
}

function renderThreshold(spec: FigureSpec): string {
  const table = readTable(spec.inputs[0]);
  const eps = column(table, "eps");
  // Skip the eps=0 row on the log axis.
  const keep = eps.map((e, i) => (e > 0 ? i : -1)).filter((i) => i >= 0);
  const pick = (name: string) => keep.map((i) => column(table, name)[i]);
  const epsPos = pick("eps");
  const left = { x: 60, y: 30, width: 280, height: 300 };
  const right = { x: 420, y: 30, width: 280, height: 300 };
  const metrics = ["l1", "l2", "linf"];
  const allErr = metrics.flatMap(pick);
  const sxL = logScale(extent(epsPos), [left.x, left.x + left.width]);
  const syL = logScale(extent(allErr), [left.y + left.height, left.y]);
  const fraction = pick("fraction");
  const sxR = logScale(extent(epsPos), [right.x, right.x + right.width]);
  const syR = logScale(extent(fraction), [right.y + right.height, right.y]);
  const parts = [
    axes(left, sxL, syL, "threshold", "relative error", { xLog: true, yLog: true }),
    ...metrics.map((m, i) => polyline(epsPos, pick(m), sxL, syL, SERIES_COLORS[i])),
    legend({ ...left, width: left.width + 40 }, metrics, SERIES_COLORS),
    axes(right, sxR, syR, "threshold", "nonzero fraction", { xLog: true, yLog: true }),
    polyline(epsPos, fraction, sxR, syR, SERIES_COLORS[3]),
  ];
  if (table.columns.has("seconds")) {
    const secs = pick("seconds");
    const sySec = logScale(extent(secs), [right.y + right.height, right.y]);
    parts.push(polyline(epsPos, secs, sxR, sySec, SERIES_COLORS[4], 1.2, "4 3"));
    parts.push(legend({ ...right, width: right.width + 40 }, ["nonzero", "seconds"], [SERIES_COLORS[3], SERIES_COLORS[4]], ["", "4 3"]));
  }
  return svgDocument(760, 400, parts.join("\n"), spec.title ?? "threshold sweep");
}

function renderHeatmap(spec: FigureSpec): string {
  const grid = readGrid(spec.inputs[0]);
  const flat = grid.values.flat();
  const [lo, hi] = extent(flat);
  const panel = { x: 60, y: 40, width: 320, height: 320 };
  const parts = [
    heatmapCells(grid.values, panel, lo, hi),
    `<rect x="${panel.x}" y="${panel.y}" width="${panel.width}" height="${panel.height}" fill="none" stroke="#555"/>`,
    colorbar({ x: panel.x + panel.width + 12, y: panel.y, width: 14, height: panel.height }, lo, hi),
    `<text x="${panel.x + panel.width / 2}" y="${panel.y + panel.height + 18}" font-size="11" text-anchor="middle">reconstruction</text>`,
  ];
  let width = 470;
  if (spec.inputs.length > 1) {
    const err = readGrid(spec.inputs[1]);
    const abs = err.values.map((row) => row.map(Math.abs));
    const [elo, ehi] = extent(abs.flat());
    const panel2 = { x: 470, y: 40, width: 320, height: 320 };
    parts.push(heatmapCells(abs, panel2, elo, ehi));
    parts.push(
      `<rect x="${panel2.x}" y="${panel2.y}" width="${panel2.width}" height="${panel2.height}" fill="none" stroke="#555"/>`,
    );
    parts.push(
      colorbar({ x: panel2.x + panel2.width + 12, y: panel2.y, width: 14, height: panel2.height }, elo, ehi),
    );
    parts.push(
      `<text x="${panel2.x + panel2.width / 2}" y="${panel2.y + panel2.height + 18}" font-size="11" text-anchor="middle">absolute error</text>`,
    );
    width = 880;
  }
  return svgDocument(width, 420, parts.join("\n"), spec.title ?? "reconstruction");
}

export function render(spec: FigureSpec): string {
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new Error("figure spec needs at least one input file");
  }
  let svg: string;
  switch (spec.kind) {
    case "overlay":
      svg = renderOverlay(spec);
      break;
    case "sweep":
      svg = renderSweep(spec);
      break;
    case "threshold":
      svg = renderThreshold(spec);
      break;
    case "heatmap":
      svg = renderHeatmap(spec);
      break;
    default:
      throw new Error(`unknown figure kind: ${(spec as FigureSpec).kind}`);
  }
  writeFileSync(spec.output, svg);
  return spec.output;
}
