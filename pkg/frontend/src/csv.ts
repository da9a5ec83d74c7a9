import { readFileSync } from "fs";
import Papa from "papaparse";

/** Raised when an input file does not match its column contract. */
export class SchemaError extends Error {}

export const TRACE_COLUMNS = [
  "t",
  "E",
  "calE",
  "calF",
  "hardy_ratio",
  "lyap_combo",
  "u_l2",
  "damped_mass_accum",
  "weighted_budget_lhs",
  "weighted_budget_rhs",
];

export const GRID_COLUMNS = ["t", "x", "cond_iii", "cond_iv"];

export const SWEEP_COLUMNS = [
  "parameter",
  "value",
  "alpha",
  "hardy_passed",
  "budget_passed",
  "status",
];

export type Row = Record<string, unknown>;

/** Parse a headered CSV and check the header against the exact contract. */
export function readTable(path: string, columns: string[]): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  }) as {
    data: Row[];
    errors: { message: string }[];
    meta: { fields?: string[] };
  };
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${first.message})`);
  }
  const header = parsed.meta.fields ?? [];
  if (header.length !== columns.length || columns.some((c, i) => header[i] !== c)) {
    throw new SchemaError(
      `${path}: expected columns [${columns.join(",")}], found [${header.join(",")}]`
    );
  }
  return parsed.data;
}

/** Pull one numeric column, rejecting non-finite entries. */
export function numericColumn(rows: Row[], name: string, path: string): number[] {
  return rows.map((row, i) => {
    const value = Number(row[name]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`${path}: row ${i + 1} has non-numeric ${name} (${row[name]})`);
    }
    return value;
  });
}
