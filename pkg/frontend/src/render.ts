/**
 * render(spec): validate, read, draw, then write the image atomically.
 *
 * Nothing touches the output path until the whole figure is built, so a
 * failing input never leaves a partial file behind.
 */

import { mkdtempSync, renameSync, rmSync, writeFileSync } from "fs";
import { dirname, join } from "path";

import { z } from "zod";

import { ADMISSIBLE, FIGURE_KINDS, FigureKind } from "./contracts.js";
import { readTable, Table } from "./csv.js";
import { buildFigure } from "./figures.js";

export const figureSpecSchema = z.object({
  kind: z.enum(FIGURE_KINDS),
  inputs: z.array(z.string().min(1)).min(1),
  output: z.string().min(1).regex(/\.svg$/i, "output must be an .svg path"),
  xLog: z.boolean().optional(),
  yLog: z.boolean().optional(),
});

export type FigureSpec = z.infer<typeof figureSpecSchema>;

export function render(spec: FigureSpec): void {
  const checked = figureSpecSchema.parse(spec);
  const kind: FigureKind = checked.kind;

  const tables: Table[] = checked.inputs.map((path) => readTable(path, ADMISSIBLE[kind]));
  const svg = buildFigure(kind, tables, { xLog: checked.xLog, yLog: checked.yLog });

  // same-filesystem temp dir so the final rename is atomic
  const scratch = mkdtempSync(join(dirnameOrDot(checked.output), ".render-"));
  try {
    const tmp = join(scratch, "figure.svg");
    writeFileSync(tmp, svg, "utf8");
    renameSync(tmp, checked.output);
  } finally {
    rmSync(scratch, { recursive: true, force: true });
  }
}

function dirnameOrDot(path: string): string {
  const dir = dirname(path);
  return dir === "" ? "." : dir;
}
