// Unit handling and number formatting. Standardized doses live in [0,1];
// raw doses are linear images inside the trial window.

import type { DoseWindow } from "./types";

export type Units = "standardized" | "raw";

export function toRawX(window: DoseWindow, x: number): number {
  return window.x_min + x * (window.x_max - window.x_min);
}

export function toRawY(window: DoseWindow, y: number): number {
  return window.y_min + y * (window.y_max - window.y_min);
}

export function fmtStd(v: number): string {
  return v.toFixed(3);
}

export function fmtRaw(v: number): string {
  return Math.abs(v) >= 100 ? v.toFixed(1) : v.toFixed(2);
}

export function fmtDose(
  units: Units,
  window: DoseWindow,
  x: number,
  y: number,
): string {
  if (units === "raw") {
    return `(${fmtRaw(toRawX(window, x))}, ${fmtRaw(toRawY(window, y))})`;
  }
  return `(${fmtStd(x)}, ${fmtStd(y)})`;
}

export function fmtAlpha(alpha: number): string {
  return alpha.toFixed(2);
}

export function fmtProbability(p: number): string {
  return (100 * p).toFixed(1) + "%";
}
