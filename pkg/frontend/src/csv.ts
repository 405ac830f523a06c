/**
 * CSV access for the polarslice output formats.
 *
 * Two layouts exist: headered tables (projection overlays, sweeps) and
 * raw numeric matrices (sampled grids, with a `<file>.meta.json` sidecar
 * describing origin/spacing/shape).
 */

import { existsSync, readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Table {
  header: string[];
  columns: Map<string, number[]>;
  rows: number;
}

export interface GridMeta {
  origin: [number, number];
  spacing: number;
  shape: [number, number];
}

export interface Grid {
  meta: GridMeta;
  /** values[i][j] at x = origin[0] + i*spacing, y = origin[1] + j*spacing */
  values: number[][];
}

function mustExist(path: string): void {
  if (!existsSync(path)) {
    throw new Error(`input file not found: ${path}`);
  }
}

export function readTable(path: string): Table {
  mustExist(path);
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`failed to parse ${path}: ${parsed.errors[0].message}`);
  }
  const header = parsed.meta.fields ?? [];
  if (header.length === 0) {
    throw new Error(`${path} has no header row`);
  }
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (const row of parsed.data) {
    for (const h of header) {
      const v = Number(row[h]);
      if (!Number.isFinite(v)) {
        throw new Error(`${path}: non-numeric value in column ${h}`);
      }
      columns.get(h)!.push(v);
    }
  }
  return { header, columns, rows: parsed.data.length };
}

export function column(table: Table, name: string): number[] {
  const col = table.columns.get(name);
  if (!col) {
    throw new Error(`missing column ${name}; have ${table.header.join(", ")}`);
  }
  return col;
}

export function readGrid(path: string): Grid {
  mustExist(path);
  const metaPath = `${path}.meta.json`;
  mustExist(metaPath);
  const meta = JSON.parse(readFileSync(metaPath, "utf-8")) as GridMeta;
  const parsed = Papa.parse<string[]>(readFileSync(path, "utf-8").trim(), {
    header: false,
    skipEmptyLines: true,
  });
  const values = (parsed.data as string[][]).map((row) => row.map(Number));
  if (values.length !== meta.shape[0] || values[0].length !== meta.shape[1]) {
    throw new Error(
      `${path}: grid is ${values.length}x${values[0]?.length}, metadata says ${meta.shape}`,
    );
  }
  return { meta, values };
}
