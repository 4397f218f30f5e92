/**
 * Frozen column contracts of the CSV artifacts this package consumes.
 *
 * Each contract mirrors, byte for byte, the header emitted by one
 * padic-sojourn subcommand.  Validation is strict: a file is accepted only
 * if its header equals one of the contracts admissible for the requested
 * figure kind: same names, same order, nothing added, nothing dropped.
 */

import { z } from "zod";

/** How a cell is read: required number, number-or-blank, or free text. */
export type CellKind = "num" | "opt" | "str";

export interface Column {
  name: string;
  cell: CellKind;
}

export interface Contract {
  id: string;
  columns: Column[];
}

export type Cell = number | string | null;
export type Row = Record<string, Cell>;

function col(name: string, cell: CellKind): Column {
  return { name, cell };
}

/** experiment survival / return-tail: long table of curves. */
export const EXPERIMENT_SERIES: Contract = {
  id: "experiment-series",
  columns: [
    col("experiment", "str"),
    col("p", "num"),
    col("alpha", "num"),
    col("t", "num"),
    col("value", "num"),
    col("stderr", "opt"),
    col("n", "opt"),
  ],
};

/** experiment sojourn-cdf: empirical and model CDF rows at fixed t. */
export const SOJOURN_CDF: Contract = {
  id: "sojourn-cdf",
  columns: [
    col("experiment", "str"),
    col("p", "num"),
    col("alpha", "num"),
    col("t", "num"),
    col("theta", "num"),
    col("value", "num"),
    col("stderr", "opt"),
    col("n", "opt"),
  ],
};

/** experiment moments: one moment-growth curve per beta. */
export const MOMENTS: Contract = {
  id: "moments",
  columns: [
    col("experiment", "str"),
    col("p", "num"),
    col("alpha", "num"),
    col("beta", "num"),
    col("t", "num"),
    col("value", "num"),
    col("stderr", "opt"),
    col("n", "opt"),
  ],
};

/** companion *_fits file of moments / return-tail runs. */
export const FITS: Contract = {
  id: "fits",
  columns: [
    col("experiment", "str"),
    col("p", "num"),
    col("alpha", "num"),
    col("beta", "opt"),
    col("t_lo", "num"),
    col("t_hi", "num"),
    col("slope", "num"),
    col("slope_stderr", "num"),
    col("predicted_slope", "opt"),
  ],
};

/** eval stable-density / stable-cdf: dual-route evaluations. */
export const STABLE: Contract = {
  id: "stable",
  columns: [
    col("gamma", "num"),
    col("t", "num"),
    col("route", "str"),
    col("value", "num"),
  ],
};

/** spectral: interface width vs time (t_a = 0) or vs age (t_a > 0). */
export const SPECTRAL: Contract = {
  id: "spectral",
  columns: [
    col("t", "num"),
    col("t_a", "num"),
    col("sigma", "num"),
    col("stderr", "num"),
    col("n", "num"),
  ],
};

export const FIGURE_KINDS = [
  "survival",
  "sojourn_cdf",
  "scaling",
  "stable",
  "spectral",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

/** Contracts each figure kind is willing to read. */
export const ADMISSIBLE: Record<FigureKind, Contract[]> = {
  survival: [EXPERIMENT_SERIES],
  sojourn_cdf: [SOJOURN_CDF],
  scaling: [MOMENTS, EXPERIMENT_SERIES, FITS],
  stable: [STABLE],
  spectral: [SPECTRAL],
};

const blank = z.literal("").transform(() => null);
// Number("") is 0, so a required numeric cell must refuse blanks itself.
const finiteNum = z.string().min(1, "blank cell in a required numeric column").pipe(z.coerce.number().finite());

function cellSchema(kind: CellKind): z.ZodType<Cell> {
  switch (kind) {
    case "num":
      return finiteNum;
    case "opt":
      return z.union([blank, finiteNum]);
    case "str":
      return z.string().min(1);
  }
}

/** Strict row validator for one contract. */
export function rowSchema(contract: Contract): z.ZodType<Row> {
  const shape: Record<string, z.ZodType<Cell>> = {};
  for (const c of contract.columns) {
    shape[c.name] = cellSchema(c.cell);
  }
  return z.object(shape).strict() as unknown as z.ZodType<Row>;
}

export function headerOf(contract: Contract): string[] {
  return contract.columns.map((c) => c.name);
}

/** Exact match: same names in the same order. */
export function matchContract(header: string[], admissible: Contract[]): Contract | null {
  for (const contract of admissible) {
    const want = headerOf(contract);
    if (want.length === header.length && want.every((name, i) => name === header[i])) {
      return contract;
    }
  }
  return null;
}
