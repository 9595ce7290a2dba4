/**
 * Figure renderers.
 *
 * Every pixel class comes straight from the CSV: this module never runs a
 * stability computation.  The only curves drawn from formulas are the
 * coordinate parabola trL2 = trL^2 and the trL = 0 half-line on the
 * `regions` figure; section overlays are read from a boundary CSV produced
 * by the stability engine.
 */

import { GridTable, BoundaryRow } from "./csv.js";
import { Raster, Color } from "./raster.js";

export const CLASS_COLORS: Record<string, Color> = {
  StableNode: [70, 130, 180, 255], // steel blue, shaded stable region
  StableFocus: [120, 170, 210, 255], // lighter blue, still "shaded"
  UnstableNode: [255, 244, 230, 255],
  UnstableFocus: [255, 230, 210, 255],
  Saddle: [240, 240, 240, 255],
  Marginal: [255, 215, 90, 255],
};

export const OVERLAY_COLOR: Color = [0, 0, 0, 255];
export const MARKER_COLOR: Color = [200, 30, 30, 255];
export const AXIS_COLOR: Color = [120, 120, 120, 255];

export const STABLE_CLASSES = new Set(["StableNode", "StableFocus"]);

export interface RenderOptions {
  /** square pixels per grid cell */
  cell?: number;
  overlay?: boolean;
}

export function classColor(klass: string): Color {
  const color = CLASS_COLORS[klass];
  if (!color) {
    throw new Error(`unknown stability class "${klass}"`);
  }
  return color;
}

/** Pixel rectangle of a grid cell; axis 0 runs right, axis 1 runs up. */
export function cellRect(
  grid: GridTable, cell: number, i: number, j: number,
): { x: number; y: number } {
  const [, count1] = [grid.counts[0], grid.counts[1]];
  return { x: i * cell, y: (count1 - 1 - j) * cell };
}

function requireTwoAxes(grid: GridTable): void {
  if (grid.counts.length !== 2) {
    throw new Error("region figures need a two-axis grid");
  }
}

function valueToPixel(values: number[], cell: number, v: number,
                      invert: boolean, count: number): number {
  const lo = values[0];
  const hi = values[values.length - 1];
  const t = (v - lo) / (hi - lo);
  const pos = t * (count - 1);
  const index = invert ? count - 1 - pos : pos;
  // centre of a cell's pixel block: for an axis value on the grid this is
  // an exact pixel, so overlays pass through the cells they belong to
  return index * cell + (cell - 1) / 2;
}

export function axisValueToPixel(values: number[], cell: number, v: number,
                                 invert: boolean): number {
  return Math.round(valueToPixel(values, cell, v, invert, values.length));
}

function paintCells(grid: GridTable, raster: Raster, cell: number): void {
  for (const row of grid.rows) {
    const { x, y } = cellRect(grid, cell, row.indices[0], row.indices[1]);
    raster.fillRect(x, y, cell, cell, classColor(row.klass));
  }
}

/**
 * Stability-region figure on an abstract (trL, trL2) grid, with the
 * analytic transition curves trL2 = trL^2 and the trL = 0 half-line.
 */
export function renderRegions(grid: GridTable, options: RenderOptions = {}): Raster {
  requireTwoAxes(grid);
  if (grid.axisNames[0] !== "trL" || grid.axisNames[1] !== "trL2") {
    throw new Error(`regions figure expects axes trL,trL2; got ${grid.axisNames}`);
  }
  const cell = options.cell ?? 4;
  const raster = new Raster(grid.counts[0] * cell, grid.counts[1] * cell);
  paintCells(grid, raster, cell);
  if (options.overlay ?? true) {
    const [xs, ys] = grid.axisValues;
    const toX = (v: number) => valueToPixel(xs, cell, v, false, grid.counts[0]);
    const toY = (v: number) => valueToPixel(ys, cell, v, true, grid.counts[1]);
    const yLo = Math.min(ys[0], ys[ys.length - 1]);
    const yHi = Math.max(ys[0], ys[ys.length - 1]);
    // parabola trL2 = trL^2, sampled densely across the x range
    let prev: [number, number] | null = null;
    const samples = grid.counts[0] * cell;
    for (let s = 0; s <= samples; s++) {
      const trl = xs[0] + ((xs[xs.length - 1] - xs[0]) * s) / samples;
      const trl2 = trl * trl;
      if (trl2 < yLo || trl2 > yHi) {
        prev = null;
        continue;
      }
      const point: [number, number] = [toX(trl), toY(trl2)];
      if (prev) raster.drawLine(prev[0], prev[1], point[0], point[1], OVERLAY_COLOR);
      prev = point;
    }
    // trL = 0 half-line through the oscillatory region trL2 < 0
    if (xs[0] <= 0 && xs[xs.length - 1] >= 0 && yLo < 0) {
      raster.drawLine(toX(0), toY(Math.min(0, yHi)), toX(0), toY(yLo), OVERLAY_COLOR);
    }
  }
  return raster;
}

/**
 * Section figure: class-shaded grid over any two axes, with the
 * oscillatory-boundary curve overlaid from a boundary CSV whose columns
 * name the same axes.
 */
export function renderSections(
  grid: GridTable, boundary: BoundaryRow[] | null,
  options: RenderOptions = {},
): Raster {
  requireTwoAxes(grid);
  const cell = options.cell ?? 4;
  const raster = new Raster(grid.counts[0] * cell, grid.counts[1] * cell);
  paintCells(grid, raster, cell);
  if ((options.overlay ?? true) && boundary) {
    const [nameX, nameY] = grid.axisNames;
    const [xs, ys] = grid.axisValues;
    const inRange = (v: number, values: number[]) => {
      const lo = Math.min(values[0], values[values.length - 1]);
      const hi = Math.max(values[0], values[values.length - 1]);
      return v >= lo && v <= hi;
    };
    const points = boundary
      .filter((row) => nameX in row && nameY in row)
      .filter((row) => inRange(row[nameX], xs) && inRange(row[nameY], ys))
      .sort((a, b) => a[nameX] - b[nameX]);
    let prev: [number, number] | null = null;
    for (const row of points) {
      const point: [number, number] = [
        valueToPixel(xs, cell, row[nameX], false, grid.counts[0]),
        valueToPixel(ys, cell, row[nameY], true, grid.counts[1]),
      ];
      if (prev) raster.drawLine(prev[0], prev[1], point[0], point[1], OVERLAY_COLOR);
      prev = point;
    }
  }
  return raster;
}

/** Oscillator phases as markers on the unit circle. */
export function renderSplayCircle(
  phases: number[], options: { size?: number } = {},
): Raster {
  if (phases.length < 2) {
    throw new Error("a splay-state illustration needs at least two phases");
  }
  const size = options.size ?? 320;
  const raster = new Raster(size, size);
  const cx = size / 2;
  const cy = size / 2;
  const radius = 0.38 * size;
  raster.drawLine(Math.round(cx - 0.47 * size), Math.round(cy),
                  Math.round(cx + 0.47 * size), Math.round(cy), AXIS_COLOR);
  raster.drawLine(Math.round(cx), Math.round(cy - 0.47 * size),
                  Math.round(cx), Math.round(cy + 0.47 * size), AXIS_COLOR);
  raster.drawCircle(cx, cy, radius, OVERLAY_COLOR);
  for (const phase of phases) {
    // screen y grows downwards, so the angle is negated
    const x = cx + radius * Math.cos(phase);
    const y = cy - radius * Math.sin(phase);
    raster.fillDisk(x, y, Math.max(3, size / 64), MARKER_COLOR);
  }
  return raster;
}

export function markerPixel(
  phase: number, size: number,
): { x: number; y: number } {
  const radius = 0.38 * size;
  return {
    x: Math.round(size / 2 + radius * Math.cos(phase)),
    y: Math.round(size / 2 - radius * Math.sin(phase)),
  };
}
