/**
 * Parsers for the two CSV schemas the stability engine emits.
 *
 * Grid CSV header:
 *   idx0[,idx1[,idx2]],<axis names>,class,max_re,re1,im1,...,oracle_max_re,agree
 * Boundary CSV: named float columns, `na` for absent cells.
 */

export interface GridRow {
  indices: number[];
  values: number[];
  klass: string;
  maxRe: number;
}

export interface GridTable {
  axisNames: string[];
  counts: number[];
  /** distinct axis values in grid order, one array per axis */
  axisValues: number[][];
  rows: GridRow[];
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

export function parseGrid(text: string): GridTable {
  const lines = splitLines(text);
  if (lines.length < 2) {
    throw new Error("grid CSV has no data rows");
  }
  const header = lines[0].split(",");
  const nAxes = header.filter((h) => /^idx\d+$/.test(h)).length;
  if (nAxes < 1 || nAxes > 3) {
    throw new Error(`grid CSV must carry 1..3 idx columns, found ${nAxes}`);
  }
  const axisNames = header.slice(nAxes, 2 * nAxes);
  const classCol = header.indexOf("class");
  const maxReCol = header.indexOf("max_re");
  if (classCol !== 2 * nAxes || maxReCol !== 2 * nAxes + 1) {
    throw new Error("grid CSV header does not match the sweep schema");
  }

  const rows: GridRow[] = [];
  const counts = new Array(nAxes).fill(0);
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const indices = cells.slice(0, nAxes).map(Number);
    const values = cells.slice(nAxes, 2 * nAxes).map(Number);
    for (let a = 0; a < nAxes; a++) {
      counts[a] = Math.max(counts[a], indices[a] + 1);
    }
    rows.push({
      indices,
      values,
      klass: cells[classCol],
      maxRe: Number(cells[maxReCol]),
    });
  }
  if (rows.length !== counts.reduce((a, b) => a * b, 1)) {
    throw new Error("grid CSV is not a complete row-major grid");
  }
  const axisValues = counts.map((count, a) => {
    const values = new Array<number>(count);
    for (const row of rows) {
      values[row.indices[a]] = row.values[a];
    }
    return values;
  });
  return { axisNames, counts, axisValues, rows };
}

export type BoundaryRow = Record<string, number>;

export function parseBoundary(text: string): BoundaryRow[] {
  const lines = splitLines(text);
  if (lines.length < 2) {
    throw new Error("boundary CSV has no data rows");
  }
  const header = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: BoundaryRow = {};
    header.forEach((name, i) => {
      if (cells[i] !== undefined && cells[i] !== "na") {
        row[name] = Number(cells[i]);
      }
    });
    return row;
  });
}
