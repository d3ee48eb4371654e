/** Strict parsing of the solver's delimited outputs.
 *
 * Every detnodes CSV is a single header line followed by comma-separated
 * rows; all requested columns must exist and hold finite numbers (an empty
 * cell is NaN and the row is kept only if the requested columns are clean).
 */

import { readFileSync } from "fs";

export class CsvError extends Error {}

export interface Table {
  columns: string[];
  /** column name -> numeric values, row-aligned */
  data: Map<string, number[]>;
  rowCount: number;
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header line");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (lines.length === 1) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    columns.forEach((col, i) => {
      const raw = (cells[i] ?? "").trim();
      data.get(col)!.push(raw === "" ? NaN : Number(raw));
    });
  }
  return { columns, data, rowCount: lines.length - 1 };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Extract columns, failing loudly with the first missing column's name. */
export function requireColumns(table: Table, names: string[]): number[][] {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new CsvError(`missing column '${name}' (found: ${table.columns.join(", ")})`);
    }
  }
  return names.map((name) => table.data.get(name)!);
}

/** Row indices where every listed column holds a finite number. */
export function finiteRows(table: Table, names: string[]): number[] {
  const cols = requireColumns(table, names);
  const keep: number[] = [];
  for (let i = 0; i < table.rowCount; i++) {
    if (cols.every((c) => Number.isFinite(c[i]))) keep.push(i);
  }
  return keep;
}
