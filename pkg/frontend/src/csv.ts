import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** Input CSV does not match the schema a recipe declares. */
export class SchemaError extends Error {}

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: CSV parse error: ${first.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new SchemaError(`${path}: empty CSV (no data rows)`);
  }
  return { path, columns, rows: parsed.data };
}

/** Throw a SchemaError naming every column the recipe needs but the file lacks. */
export function requireColumns(table: Table, needed: string[], figureId: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${figureId}: ${table.path} is missing column(s) ${missing
        .map((c) => `'${c}'`)
        .join(", ")}`,
    );
  }
}

export function num(row: Record<string, string>, column: string): number {
  const raw = row[column];
  if (raw === undefined || raw === "") return NaN;
  return Number(raw);
}

export function isTrue(row: Record<string, string>, column: string): boolean {
  return row[column] === "true";
}
