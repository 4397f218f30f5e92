import { existsSync, mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";

import { ZodError } from "zod";
import { afterAll, describe, expect, it } from "vitest";

import { EmptyDataError } from "../src/csv.js";
import { render } from "../src/render.js";

const FIX = fileURLToPath(new URL("./fixtures", import.meta.url));
const scratch = mkdtempSync(join(tmpdir(), "render-test-"));

afterAll(() => {
  rmSync(scratch, { recursive: true, force: true });
});

describe("render", () => {
  it("writes the figure and cleans up its staging directory", () => {
    const out = join(scratch, "survival.svg");
    render({ kind: "survival", inputs: [join(FIX, "survival.csv")], output: out });
    expect(readFileSync(out, "utf8").startsWith("<svg ")).toBe(true);
    expect(readdirSync(scratch).filter((n) => n.startsWith(".render-"))).toHaveLength(0);
  });

  it("produces byte identical output on repeat runs", () => {
    const a = join(scratch, "a.svg");
    const b = join(scratch, "b.svg");
    const spec = { kind: "scaling" as const, inputs: [join(FIX, "scaling.csv"), join(FIX, "scaling_fits.csv")] };
    render({ ...spec, output: a });
    render({ ...spec, output: b });
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("rejects a non svg output path before reading anything", () => {
    const out = join(scratch, "fig.png");
    expect(() => render({ kind: "survival", inputs: [join(FIX, "survival.csv")], output: out })).toThrow(ZodError);
    expect(existsSync(out)).toBe(false);
  });

  it("leaves no file behind when the data is unusable", () => {
    const empty = join(scratch, "empty.csv");
    writeFileSync(empty, "experiment,p,alpha,t,value,stderr,n\n");
    const out = join(scratch, "empty.svg");
    expect(() => render({ kind: "survival", inputs: [empty], output: out })).toThrow(EmptyDataError);
    expect(existsSync(out)).toBe(false);
    expect(readdirSync(scratch).filter((n) => n.startsWith(".render-"))).toHaveLength(0);
  });

  it("rejects an unknown figure kind in the render request", () => {
    expect(() =>
      render({ kind: "histogram" as never, inputs: [join(FIX, "survival.csv")], output: join(scratch, "h.svg") }),
    ).toThrow(ZodError);
  });
});
