#!/usr/bin/env node
/**
 * plot-figures: render phase-diagram figures from stability-engine CSVs.
 *
 *   plot-figures --input grid.csv --figure regions --out fig.png
 *   plot-figures --input grid.csv --figure ks-inertia-sections \
 *                --boundary boundary.csv --out fig.png
 *   plot-figures --input state.json --figure splay-circle --out fig.png
 *
 * Figure kinds: regions | inertia-sections | ks-inertia-sections |
 * splay-circle.  `--no-overlay` suppresses boundary/transition curves,
 * `--cell N` sets pixels per grid cell.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { parseBoundary, parseGrid } from "./csv.js";
import { renderRegions, renderSections, renderSplayCircle } from "./figures.js";
import { encodePng } from "./png.js";
import { Raster } from "./raster.js";

export interface CliOptions {
  input: string;
  figure: string;
  out: string;
  boundary?: string;
  cell: number;
  overlay: boolean;
  size: number;
}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = {
    input: "", figure: "", out: "", cell: 4, overlay: true, size: 320,
  };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--input": options.input = next(); break;
      case "--figure": options.figure = next(); break;
      case "--out": options.out = next(); break;
      case "--boundary": options.boundary = next(); break;
      case "--cell": options.cell = Number(next()); break;
      case "--size": options.size = Number(next()); break;
      case "--no-overlay": options.overlay = false; break;
      case "--help":
      case "-h":
        throw new UsageError("");
      default:
        throw new UsageError(`unknown argument ${arg}`);
    }
  }
  if (!options.input || !options.figure || !options.out) {
    throw new UsageError("--input, --figure and --out are required");
  }
  const kinds = ["regions", "inertia-sections", "ks-inertia-sections", "splay-circle"];
  if (!kinds.includes(options.figure)) {
    throw new UsageError(`--figure must be one of ${kinds.join(", ")}`);
  }
  if (!Number.isFinite(options.cell) || options.cell < 1) {
    throw new UsageError("--cell must be a positive integer");
  }
  return options;
}

export class UsageError extends Error {}

const USAGE = `usage: plot-figures --input FILE --figure KIND --out FILE.png
  KIND: regions | inertia-sections | ks-inertia-sections | splay-circle
  options: --boundary FILE.csv  --cell N  --size N  --no-overlay`;

export function render(options: CliOptions): Raster {
  if (options.figure === "splay-circle") {
    const doc = JSON.parse(readFileSync(options.input, "utf8"));
    if (!Array.isArray(doc.phases)) {
      throw new Error("state JSON must carry a phases array");
    }
    return renderSplayCircle(doc.phases as number[], { size: options.size });
  }
  const grid = parseGrid(readFileSync(options.input, "utf8"));
  const renderOptions = { cell: options.cell, overlay: options.overlay };
  if (options.figure === "regions") {
    return renderRegions(grid, renderOptions);
  }
  const boundary = options.boundary
    ? parseBoundary(readFileSync(options.boundary, "utf8"))
    : null;
  return renderSections(grid, boundary, renderOptions);
}

export function main(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (error) {
    if (error instanceof UsageError) {
      if (error.message) console.error(`plot-figures: ${error.message}`);
      console.error(USAGE);
      return 2;
    }
    throw error;
  }
  try {
    const raster = render(options);
    writeFileSync(options.out, encodePng(raster.width, raster.height, raster.data));
    return 0;
  } catch (error) {
    console.error(`plot-figures: ${(error as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
