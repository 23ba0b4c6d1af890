import { readFileSync } from "node:fs";

export interface CsvTable {
  header: string[];
  rows: string[][];
}

/** Parse a simple comma-separated file (no quoting, first line = header). */
export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV input");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(`ragged CSV row: expected ${header.length} fields, got ${row.length}`);
    }
  }
  return { header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"));
}

export function requireColumns(table: CsvTable, names: string[], where: string): void {
  for (const name of names) {
    if (!table.header.includes(name)) {
      throw new Error(`missing column '${name}' in ${where} (header: ${table.header.join(",")})`);
    }
  }
}
