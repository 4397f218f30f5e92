/**
 * Strict reader for the canonical CSVs.
 *
 * '#'-prefixed lines are the producer's metadata header and are skipped;
 * the first remaining line must equal one admissible contract exactly.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

import { Contract, Row, matchContract, headerOf, rowSchema } from "./contracts.js";

export class SchemaError extends Error {}
export class EmptyDataError extends Error {}
export class DataError extends Error {}

export interface Table {
  path: string;
  contract: Contract;
  rows: Row[];
}

export function readTable(path: string, admissible: Contract[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err: any) {
    throw new DataError(`cannot read ${path}: ${err?.message ?? err}`);
  }

  // the producer always writes comma separated fields; pinning the
  // delimiter keeps auto-detection from rejecting comment-only files
  const parsed = Papa.parse<string[]>(text, {
    comments: "#",
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${path}: malformed CSV (${first.message})`);
  }

  const lines = parsed.data;
  if (lines.length === 0) {
    throw new EmptyDataError(`${path}: no header line`);
  }

  const header = lines[0]!;
  const contract = matchContract(header, admissible);
  if (contract === null) {
    const expected = admissible.map((c) => headerOf(c).join(",")).join("  or  ");
    throw new SchemaError(
      `${path}: header [${header.join(",")}] does not match any admissible contract; expected ${expected}`,
    );
  }

  const body = lines.slice(1);
  if (body.length === 0) {
    throw new EmptyDataError(`${path}: header only, no data rows`);
  }

  const schema = rowSchema(contract);
  const names = headerOf(contract);
  const rows: Row[] = [];
  for (let i = 0; i < body.length; i++) {
    const cells = body[i]!;
    if (cells.length !== names.length) {
      throw new SchemaError(
        `${path}: row ${i + 2} has ${cells.length} cells, contract '${contract.id}' has ${names.length}`,
      );
    }
    const record: Record<string, string> = {};
    for (let j = 0; j < names.length; j++) {
      record[names[j]!] = cells[j]!;
    }
    const result = schema.safeParse(record);
    if (!result.success) {
      const issue = result.error.issues[0]!;
      throw new SchemaError(
        `${path}: row ${i + 2}, column '${issue.path.join(".")}': ${issue.message}`,
      );
    }
    rows.push(result.data);
  }

  return { path, contract, rows };
}
