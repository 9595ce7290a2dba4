/**
 * End-to-end: drive the stability engine's CLI for real section grids and
 * boundary curves, render them, and check the images pixel by pixel.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseBoundary, parseGrid } from "../src/csv.js";
import {
  CLASS_COLORS,
  OVERLAY_COLOR,
  STABLE_CLASSES,
  axisValueToPixel,
  cellRect,
  renderSections,
} from "../src/figures.js";
import { main } from "../src/cli.js";
import { decodePng } from "../src/png.js";

function primaryCommand(): string[] | null {
  for (const candidate of [["splaylab"], ["python3", "-m", "splaylab.cli"]]) {
    try {
      execFileSync(candidate[0], [...candidate.slice(1), "--help"],
                   { stdio: "pipe" });
      return candidate;
    } catch {
      // try the next one
    }
  }
  return null;
}

const PRIMARY = primaryCommand();

function runPrimary(args: string[]): void {
  if (!PRIMARY) throw new Error("no stability engine available");
  execFileSync(PRIMARY[0], [...PRIMARY.slice(1), ...args], { stdio: "pipe" });
}

function centreColor(
  png: { width: number; rgba: Uint8Array }, x: number, y: number,
): number[] {
  const i = (y * png.width + x) * 4;
  return [png.rgba[i], png.rgba[i + 1], png.rgba[i + 2], png.rgba[i + 3]];
}

describe.skipIf(!PRIMARY)("end-to-end against the stability engine", () => {
  const work = mkdtempSync(join(tmpdir(), "splay-figures-"));
  const cell = 5;

  it("renders a phase-lag/inertia section pixel-exactly with its boundary", () => {
    const gridCsv = join(work, "ks-inertia.csv");
    const boundaryCsv = join(work, "ks-inertia-boundary.csv");
    runPrimary([
      "sweep", "--model", "ks-inertia",
      "--axis", "alpha:0:6.283185307179586:24",
      "--axis", "delta:0:1.5707963267948966:24",
      "--fixed", "gamma=0.5", "--out", gridCsv,
    ]);
    runPrimary([
      "boundary", "--model", "ks-inertia", "--gamma", "0.5",
      "--min", "1.6", "--max", "4.7", "--count", "200", "--out", boundaryCsv,
    ]);

    const plain = join(work, "sections-plain.png");
    expect(main(["--input", gridCsv, "--figure", "ks-inertia-sections",
                 "--out", plain, "--cell", String(cell),
                 "--no-overlay"])).toBe(0);
    const png = decodePng(readFileSync(plain));
    const grid = parseGrid(readFileSync(gridCsv, "utf8"));
    expect(png.width).toBe(24 * cell);

    // every cell centre carries exactly its CSV class colour
    let stableCells = 0;
    for (const row of grid.rows) {
      const { x, y } = cellRect(grid, cell, row.indices[0], row.indices[1]);
      expect(centreColor(png, x + 2, y + 2)).toEqual(
        [...CLASS_COLORS[row.klass]]);
      if (STABLE_CLASSES.has(row.klass)) stableCells++;
    }
    // ... so the shaded pixel set equals the CSV's stable rows exactly
    let shadedPixels = 0;
    for (let i = 0; i < png.rgba.length; i += 4) {
      const px = png.rgba.subarray(i, i + 4);
      for (const klass of STABLE_CLASSES) {
        const c = CLASS_COLORS[klass];
        if (px[0] === c[0] && px[1] === c[1] && px[2] === c[2]) {
          shadedPixels++;
          break;
        }
      }
    }
    expect(shadedPixels).toBe(stableCells * cell * cell);

    // with the overlay on, the curve passes through the boundary point
    // computed independently by the engine (alpha = 2 -> R_2^2 ~ 0.6187)
    const withOverlay = join(work, "sections-overlay.png");
    expect(main(["--input", gridCsv, "--figure", "ks-inertia-sections",
                 "--boundary", boundaryCsv, "--out", withOverlay,
                 "--cell", String(cell)])).toBe(0);
    const overlayPng = decodePng(readFileSync(withOverlay));
    const boundary = parseBoundary(readFileSync(boundaryCsv, "utf8"));
    const near = boundary
      .filter((row) => "delta" in row)
      .reduce((best, row) =>
        Math.abs(row.alpha - 2) < Math.abs(best.alpha - 2) ? row : best);
    expect(Math.sqrt(near.r2_squared)).toBeCloseTo(0.787, 2);
    const raster = renderSections(grid, boundary, { cell });
    let found = false;
    const [xs, ys] = grid.axisValues;
    const px = axisValueToPixel(xs, cell, near.alpha, false);
    const py = axisValueToPixel(ys, cell, near.delta, true);
    for (let dy = -1; dy <= 1 && !found; dy++) {
      for (let dx = -1; dx <= 1 && !found; dx++) {
        const c = centreColor(overlayPng, px + dx, py + dy);
        found = c[0] === OVERLAY_COLOR[0] && c[1] === OVERLAY_COLOR[1] &&
          c[2] === OVERLAY_COLOR[2];
      }
    }
    expect(found).toBe(true);
    // the in-process raster agrees byte-for-byte with the CLI's PNG payload
    expect(Buffer.from(raster.data).equals(Buffer.from(overlayPng.rgba)))
      .toBe(true);
  });

  it("renders an inertial trace-plane section with its boundary", () => {
    const gridCsv = join(work, "inertia.csv");
    const boundaryCsv = join(work, "inertia-boundary.csv");
    runPrimary([
      "sweep", "--model", "inertia",
      "--axis", "trL:-3:3:20", "--axis", "trL2:-3:6:20",
      "--fixed", "gamma=0.5", "--out", gridCsv,
    ]);
    runPrimary([
      "boundary", "--model", "inertia-generic", "--gamma", "0.5",
      "--min", "-3", "--max", "-0.05", "--count", "60", "--out", boundaryCsv,
    ]);
    const out = join(work, "inertia-sections.png");
    expect(main(["--input", gridCsv, "--figure", "inertia-sections",
                 "--boundary", boundaryCsv, "--out", out,
                 "--cell", String(cell), "--no-overlay"])).toBe(0);
    const png = decodePng(readFileSync(out));
    const grid = parseGrid(readFileSync(gridCsv, "utf8"));
    let stableCells = 0;
    for (const row of grid.rows) {
      const { x, y } = cellRect(grid, cell, row.indices[0], row.indices[1]);
      expect(centreColor(png, x + 2, y + 2)).toEqual(
        [...CLASS_COLORS[row.klass]]);
      if (STABLE_CLASSES.has(row.klass)) stableCells++;
    }
    expect(stableCells).toBeGreaterThan(0);

    // with the overlay on, the curve passes through the engine-computed
    // boundary point nearest trL = -1 (trL2 = 0.25 at gamma = 0.5)
    const overlayOut = join(work, "inertia-overlay.png");
    expect(main(["--input", gridCsv, "--figure", "inertia-sections",
                 "--boundary", boundaryCsv, "--out", overlayOut,
                 "--cell", String(cell)])).toBe(0);
    const overlayPng = decodePng(readFileSync(overlayOut));
    const boundary = parseBoundary(readFileSync(boundaryCsv, "utf8"));
    const near = boundary.reduce((best, row) =>
      Math.abs(row.trL + 1) < Math.abs(best.trL + 1) ? row : best);
    expect(near.trL2).toBeCloseTo(0.25, 2);
    const px = axisValueToPixel(grid.axisValues[0], cell, near.trL, false);
    const py = axisValueToPixel(grid.axisValues[1], cell, near.trL2, true);
    let found = false;
    for (let dy = -1; dy <= 1 && !found; dy++) {
      for (let dx = -1; dx <= 1 && !found; dx++) {
        const c = centreColor(overlayPng, px + dx, py + dy);
        found = c[0] === OVERLAY_COLOR[0] && c[1] === OVERLAY_COLOR[1] &&
          c[2] === OVERLAY_COLOR[2];
      }
    }
    expect(found).toBe(true);
  });

  it("renders a sampled state on the unit circle", () => {
    const stateJson = join(work, "state.json");
    runPrimary(["sample", "--model", "ks", "--n", "4", "--method", "twisted",
                "--k", "1", "--out", stateJson]);
    const out = join(work, "circle.png");
    expect(main(["--input", stateJson, "--figure", "splay-circle",
                 "--out", out])).toBe(0);
    const png = decodePng(readFileSync(out));
    expect(png.width).toBe(320);
  });
});
