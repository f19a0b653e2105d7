import { readFileSync } from "node:fs";

export interface CsvTable {
  path: string;
  header: string[];
  rows: string[][];
}

/** Read a comma-separated file with a header row. Fields are never quoted. */
export function readCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1]!.trim() === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const header = lines[0]!.split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(",");
    if (parts.length !== header.length) {
      throw new Error(
        `${path}: line ${i + 1} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    rows.push(parts);
  }
  return { path, header, rows };
}

/**
 * Resolve the index of each required column, failing with the name of the
 * first column that is absent from the header.
 */
export function requireColumns(
  table: CsvTable,
  names: string[],
): Record<string, number> {
  const index: Record<string, number> = {};
  for (const name of names) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      throw new Error(`${table.path}: missing column "${name}"`);
    }
    index[name] = i;
  }
  return index;
}

export function parseNumber(table: CsvTable, row: string[], column: number): number {
  const raw = row[column];
  const value = Number(raw);
  if (raw === undefined || raw.trim() === "" || Number.isNaN(value)) {
    throw new Error(`${table.path}: cannot parse "${raw}" as a number`);
  }
  return value;
}
