import * as fs from "fs";

export class SchemaMismatch extends Error {}
export class MissingInput extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): Table {
  if (!fs.existsSync(path)) {
    throw new MissingInput(`input file not found: ${path}`);
  }
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatch(`${path}: empty file`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaMismatch(
        `${path}: row has ${row.length} cells, header has ${header.length}`);
    }
  }
  return { header, rows };
}

/** Validate the exact column list and parse numeric columns.
 *
 * `optional` columns may be empty (parsed as NaN); everything else must be
 * a finite number.
 */
export function numericTable(
  path: string,
  columns: string[],
  optional: string[] = [],
  allowNaN: string[] = [],
): number[][] {
  const table = readCsv(path);
  if (table.header.join(",") !== columns.join(",")) {
    throw new SchemaMismatch(
      `${path}: expected columns "${columns.join(",")}", ` +
      `got "${table.header.join(",")}"`);
  }
  const opt = new Set(optional.map((c) => columns.indexOf(c)));
  const nan = new Set(allowNaN.map((c) => columns.indexOf(c)));
  return table.rows.map((row, r) =>
    row.map((cell, c) => {
      if (cell === "" && opt.has(c)) return NaN;
      const value = Number(cell);
      if (Number.isNaN(value) && !nan.has(c)) {
        throw new SchemaMismatch(`${path}: row ${r + 1}, column ` +
          `"${columns[c]}": not a number: "${cell}"`);
      }
      if (!Number.isFinite(value) && !nan.has(c) && cell !== "") {
        throw new SchemaMismatch(`${path}: row ${r + 1}, column ` +
          `"${columns[c]}": not finite: "${cell}"`);
      }
      return value;
    }));
}
