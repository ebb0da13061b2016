// SVG curve plot: posterior-median MTD curve, conditional-MTD quantile
// bands, a binned heatmap of treated combinations, and dose markers.
// Pure string assembly so tests can inspect the geometry.

import type { CurvePayload, RecommendedPatient, TranscriptRow } from "./types";

export interface PlotGeometry {
  width: number;
  height: number;
  margin: number;
}

export const DEFAULT_GEOMETRY: PlotGeometry = {
  width: 420,
  height: 420,
  margin: 40,
};

export interface Scale {
  (v: number): number;
}

export function scaleX(geom: PlotGeometry): Scale {
  const span = geom.width - 2 * geom.margin;
  return (v) => geom.margin + v * span;
}

export function scaleY(geom: PlotGeometry): Scale {
  const span = geom.height - 2 * geom.margin;
  return (v) => geom.height - geom.margin - v * span;
}

export function polylinePoints(
  xs: number[],
  ys: number[],
  geom: PlotGeometry,
): string {
  const sx = scaleX(geom);
  const sy = scaleY(geom);
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i]!;
    const y = ys[i]!;
    parts.push(`${sx(x).toFixed(2)},${sy(y).toFixed(2)}`);
  }
  return parts.join(" ");
}

export function bandPolygon(
  xs: number[],
  lower: number[],
  upper: number[],
  geom: PlotGeometry,
): string {
  const forward = polylinePoints(xs, upper, geom);
  const backward = polylinePoints(
    [...xs].reverse(),
    [...lower].reverse(),
    geom,
  );
  return `${forward} ${backward}`;
}

export function binCounts(
  doses: Array<{ x: number; y: number }>,
  nBins: number,
): number[][] {
  const grid: number[][] = Array.from({ length: nBins }, () =>
    new Array<number>(nBins).fill(0),
  );
  for (const d of doses) {
    const i = Math.min(nBins - 1, Math.floor(d.x * nBins));
    const j = Math.min(nBins - 1, Math.floor(d.y * nBins));
    grid[i]![j]! += 1;
  }
  return grid;
}

function heatCells(
  doses: Array<{ x: number; y: number }>,
  nBins: number,
  geom: PlotGeometry,
): string {
  const grid = binCounts(doses, nBins);
  const max = Math.max(1, ...grid.flat());
  const sx = scaleX(geom);
  const sy = scaleY(geom);
  const w = (geom.width - 2 * geom.margin) / nBins;
  const h = (geom.height - 2 * geom.margin) / nBins;
  const cells: string[] = [];
  for (let i = 0; i < nBins; i++) {
    for (let j = 0; j < nBins; j++) {
      const count = grid[i]![j]!;
      if (count === 0) continue;
      const alpha = (0.65 * count) / max;
      cells.push(
        `<rect x="${sx(i / nBins).toFixed(2)}" ` +
          `y="${(sy((j + 1) / nBins)).toFixed(2)}" ` +
          `width="${w.toFixed(2)}" height="${h.toFixed(2)}" ` +
          `fill="rgba(180,100,20,${alpha.toFixed(3)})" ` +
          `data-count="${count}"/>`,
      );
    }
  }
  return cells.join("");
}

function marker(
  x: number,
  y: number,
  cls: string,
  geom: PlotGeometry,
): string {
  const sx = scaleX(geom);
  const sy = scaleY(geom);
  return (
    `<circle cx="${sx(x).toFixed(2)}" cy="${sy(y).toFixed(2)}" r="4" ` +
    `class="${cls}"/>`
  );
}

export function renderCurveSvg(
  curve: CurvePayload,
  treated: TranscriptRow[],
  pending: RecommendedPatient[],
  geom: PlotGeometry = DEFAULT_GEOMETRY,
): string {
  const xs = curve.points.map((p) => p.x);
  const median = curve.points.map((p) => p.y_estimate);
  const alphas = [...curve.band_alphas].sort((a, b) => a - b);
  const loKey = String(alphas[0]);
  const hiKey = String(alphas[alphas.length - 1]);
  const midKey = String(alphas[Math.floor(alphas.length / 2)]);
  const lower = curve.points.map((p) => p.bands[loKey] ?? 0);
  const upper = curve.points.map((p) => p.bands[hiKey] ?? 0);
  const mid = curve.points.map((p) => p.bands[midKey] ?? 0);
  const sx = scaleX(geom);
  const sy = scaleY(geom);

  const axes =
    `<line x1="${sx(0)}" y1="${sy(0)}" x2="${sx(1)}" y2="${sy(0)}" ` +
    `class="axis"/>` +
    `<line x1="${sx(0)}" y1="${sy(0)}" x2="${sx(0)}" y2="${sy(1)}" ` +
    `class="axis"/>` +
    `<text x="${sx(0.5)}" y="${geom.height - 6}" class="axis-label">` +
    `drug A (standardized)</text>` +
    `<text x="12" y="${sy(0.5)}" class="axis-label" ` +
    `transform="rotate(-90 12 ${sy(0.5)})">drug B (standardized)</text>`;

  const parts = [
    `<svg viewBox="0 0 ${geom.width} ${geom.height}" class="curve-plot" ` +
      `xmlns="http://www.w3.org/2000/svg">`,
    heatCells(treated, 20, geom),
    `<polygon points="${bandPolygon(xs, lower, upper, geom)}" class="band"/>`,
    `<polyline points="${polylinePoints(xs, mid, geom)}" class="band-mid" ` +
      `fill="none"/>`,
    `<polyline points="${polylinePoints(xs, median, geom)}" class="curve" ` +
      `fill="none"/>`,
    treated
      .map((r) => marker(r.x, r.y, r.t === 1 ? "dot-dlt" : "dot-ok", geom))
      .join(""),
    pending.map((p) => marker(p.x, p.y, "dot-pending", geom)).join(""),
    axes,
    `</svg>`,
  ];
  return parts.join("");
}
