/**
 * Exit code contract, exercised in process:
 *   0 figure written, 2 flag or spec errors, 3 schema or data errors.
 */

import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";

import { afterAll, afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

const FIX = fileURLToPath(new URL("./fixtures", import.meta.url));
const scratch = mkdtempSync(join(tmpdir(), "cli-test-"));

let errText = "";

beforeEach(() => {
  errText = "";
  vi.spyOn(process.stderr, "write").mockImplementation((chunk): boolean => {
    errText += String(chunk);
    return true;
  });
});

afterEach(() => {
  vi.restoreAllMocks();
});

afterAll(() => {
  rmSync(scratch, { recursive: true, force: true });
});

function fix(name: string): string {
  return join(FIX, name);
}

describe("render success paths", () => {
  const cases: Array<[string, string[]]> = [
    ["survival", [fix("survival.csv")]],
    ["sojourn_cdf", [fix("sojourn_cdf.csv")]],
    ["scaling", [fix("scaling.csv"), fix("scaling_fits.csv")]],
    ["scaling", [fix("return_tail.csv"), fix("return_tail_fits.csv")]],
    ["stable", [fix("stable.csv")]],
    ["spectral", [fix("spectral.csv")]],
  ];

  it.each(cases)("renders %s from %j", (kind, inputs) => {
    const out = join(scratch, `${kind}-${inputs.length}.svg`);
    const argv = ["render", "--kind", kind, ...inputs.flatMap((p) => ["--in", p]), "--out", out];
    expect(main(argv)).toBe(0);
    expect(errText).toBe("");
    expect(readFileSync(out, "utf8").startsWith("<svg ")).toBe(true);
  });

  it("writes byte identical figures across invocations", () => {
    const a = join(scratch, "rep-a.svg");
    const b = join(scratch, "rep-b.svg");
    expect(main(["render", "--kind", "stable", "--in", fix("stable.csv"), "--out", a])).toBe(0);
    expect(main(["render", "--kind", "stable", "--in", fix("stable.csv"), "--out", b])).toBe(0);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });
});

describe("flag and spec errors exit 2", () => {
  it("requires a command", () => {
    expect(main([])).toBe(2);
    expect(errText).toMatch(/a command is required/);
  });

  it("rejects an unknown command", () => {
    expect(main(["frobnicate"])).toBe(2);
  });

  it("requires --in", () => {
    expect(main(["render", "--kind", "survival", "--out", join(scratch, "x.svg")])).toBe(2);
    expect(errText).toMatch(/Missing required argument: in/);
  });

  it("rejects an unknown kind", () => {
    expect(main(["render", "--kind", "pie", "--in", fix("survival.csv"), "--out", join(scratch, "x.svg")])).toBe(2);
    expect(errText).toMatch(/Choices:/);
  });

  it("rejects a non svg output path", () => {
    const out = join(scratch, "fig.pdf");
    expect(main(["render", "--kind", "survival", "--in", fix("survival.csv"), "--out", out])).toBe(2);
    expect(errText).toMatch(/output must be an \.svg path/);
    expect(existsSync(out)).toBe(false);
  });
});

describe("schema and data errors exit 3", () => {
  it("rejects a CSV of the wrong kind and writes nothing", () => {
    const out = join(scratch, "wrong.svg");
    expect(main(["render", "--kind", "survival", "--in", fix("stable.csv"), "--out", out])).toBe(3);
    expect(errText).toMatch(/does not match any admissible contract/);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects a header only CSV and writes nothing", () => {
    const empty = join(scratch, "empty.csv");
    writeFileSync(empty, "gamma,t,route,value\n");
    const out = join(scratch, "empty.svg");
    expect(main(["render", "--kind", "stable", "--in", empty, "--out", out])).toBe(3);
    expect(errText).toMatch(/header only, no data rows/);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects a missing input file", () => {
    const out = join(scratch, "missing.svg");
    expect(main(["render", "--kind", "stable", "--in", join(scratch, "no_such.csv"), "--out", out])).toBe(3);
    expect(errText).toMatch(/cannot read/);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects a corrupted numeric cell", () => {
    const bad = join(scratch, "bad.csv");
    writeFileSync(bad, "gamma,t,route,value\n0.5,0.5,series,0.29\n0.5,xyz,series,0.26\n");
    expect(main(["render", "--kind", "stable", "--in", bad, "--out", join(scratch, "bad.svg")])).toBe(3);
    expect(errText).toMatch(/row 3, column 't'/);
  });
});
