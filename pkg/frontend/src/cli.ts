#!/usr/bin/env node
/**
 * Command line: one `render` subcommand.
 *
 *   padic-sojourn-plots render --kind survival --in survival.csv --out fig.svg
 *
 * Exit codes mirror the producing CLI: 0 success, 2 flag or spec errors,
 * 3 schema mismatch / empty or unusable data.
 */

import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { ZodError } from "zod";

import { FIGURE_KINDS } from "./contracts.js";
import { DataError, EmptyDataError, SchemaError } from "./csv.js";
import { render } from "./render.js";

export function main(argv: string[]): number {
  let code = 0;

  const parser = yargs(argv)
    .scriptName("padic-sojourn-plots")
    .command(
      "render",
      "draw one figure from canonical CSV artifacts",
      (y) =>
        y
          .option("kind", {
            choices: FIGURE_KINDS,
            demandOption: true,
            describe: "figure family",
          })
          .option("in", {
            type: "string",
            array: true,
            demandOption: true,
            describe: "input CSV path(s)",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output SVG path",
          })
          .option("x-log", { type: "boolean", describe: "force log/linear x axis" })
          .option("y-log", { type: "boolean", describe: "force log/linear y axis" }),
      (args) => {
        if (code !== 0) return;
        try {
          render({
            kind: args.kind,
            inputs: args.in,
            output: args.out,
            xLog: args["x-log"],
            yLog: args["y-log"],
          });
        } catch (err) {
          if (err instanceof ZodError) {
            process.stderr.write(`spec error: ${err.issues[0]?.message ?? err.message}\n`);
            code = 2;
          } else if (err instanceof SchemaError || err instanceof EmptyDataError || err instanceof DataError) {
            process.stderr.write(`error: ${err.message}\n`);
            code = 3;
          } else {
            throw err;
          }
        }
      },
    )
    .demandCommand(1, "a command is required")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err !== undefined && err !== null) throw err;
      process.stderr.write(`error: ${msg}\n`);
      code = 2;
    });

  try {
    parser.parseSync();
  } catch (err: any) {
    process.stderr.write(`error: ${err?.message ?? err}\n`);
    code = code === 0 ? 2 : code;
  }
  return code;
}

const entryUrl = process.argv[1] === undefined ? "" : pathToFileURL(process.argv[1]).href;
if (import.meta.url === entryUrl) {
  process.exit(main(process.argv.slice(2)));
}
