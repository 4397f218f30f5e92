/**
 * Figure builders: validated tables in, SVG text out.
 *
 * Each kind has fixed axis-scale defaults (overridable per axis from the
 * CLI) and derives its series grouping from the contract columns alone.
 */

import { basename } from "path";

import { Contract, FigureKind, FITS, MOMENTS, Row } from "./contracts.js";
import { DataError, Table } from "./csv.js";
import { Annotation, Frame, fmt, linScale, logScale, padDomain, renderSvg, Scale, Series, HEIGHT, MARGIN, WIDTH } from "./svg.js";

interface AxisFlags {
  xLog?: boolean;
  yLog?: boolean;
}

const DEFAULT_LOG: Record<FigureKind, { x: boolean; y: boolean }> = {
  survival: { x: true, y: true },
  sojourn_cdf: { x: false, y: false },
  scaling: { x: true, y: true },
  stable: { x: true, y: true },
  spectral: { x: true, y: true },
};

function num(row: Row, key: string): number {
  return row[key] as number;
}

function optNum(row: Row, key: string): number | null {
  const v = row[key];
  return typeof v === "number" ? v : null;
}

function str(row: Row, key: string): string {
  return String(row[key]);
}

/** file stem prefix keeps labels unique when several CSVs overlay */
function prefixed(tables: Table[], path: string, label: string): string {
  if (tables.length <= 1) return label;
  return `${basename(path).replace(/\.[^.]*$/, "")}: ${label}`;
}

interface SeriesDef extends Series {
  sortKey: string;
}

function groupSeries(
  tables: Table[],
  xKey: string,
  groupOf: (row: Row) => string,
  include: (row: Row) => boolean = () => true,
): SeriesDef[] {
  const acc = new Map<string, SeriesDef>();
  for (const table of tables) {
    for (const row of table.rows) {
      if (!include(row)) continue;
      const label = prefixed(tables, table.path, groupOf(row));
      let s = acc.get(label);
      if (s === undefined) {
        s = { label, sortKey: label, points: [] };
        acc.set(label, s);
      }
      s.points.push({ x: num(row, xKey), y: num(row, "value"), err: optNum(row, "stderr") ?? undefined });
    }
  }
  const out = [...acc.values()].sort((a, b) => (a.sortKey < b.sortKey ? -1 : a.sortKey > b.sortKey ? 1 : 0));
  for (const s of out) {
    s.points.sort((a, b) => a.x - b.x);
  }
  return out;
}

function buildScales(
  series: Series[],
  flags: AxisFlags,
  kind: FigureKind,
  extra: { x: number; y: number }[] = [],
): { x: Scale; y: Scale } {
  const xLog = flags.xLog ?? DEFAULT_LOG[kind].x;
  const yLog = flags.yLog ?? DEFAULT_LOG[kind].y;

  // log axes silently cannot show non-positive values; drop those points
  for (const s of series) {
    s.points = s.points.filter((p) => (!xLog || p.x > 0) && (!yLog || p.y > 0));
  }
  const pts = series.flatMap((s) => s.points);
  if (pts.length === 0) {
    throw new DataError("no plottable points (all filtered by log-scale axes?)");
  }
  const all = pts.concat(extra.filter((p) => (!xLog || p.x > 0) && (!yLog || p.y > 0)));

  const xs = all.map((p) => p.x);
  const ys = all.map((p) => p.y);
  const [xLo, xHi] = padDomain(Math.min(...xs), Math.max(...xs), xLog);
  const [yLo, yHi] = padDomain(Math.min(...ys), Math.max(...ys), yLog);

  const r = { x0: MARGIN.left, x1: WIDTH - MARGIN.right, y0: HEIGHT - MARGIN.bottom, y1: MARGIN.top };
  const x = xLog ? logScale(xLo, xHi, r.x0, r.x1) : linScale(xLo, xHi, r.x0, r.x1);
  const y = yLog ? logScale(yLo, yHi, r.y0, r.y1) : linScale(yLo, yHi, r.y0, r.y1);
  return { x, y };
}

function titleSuffix(tables: Table[]): string {
  const first = tables[0]!.rows[0]!;
  const p = first["p"];
  const alpha = first["alpha"];
  if (typeof p === "number" && typeof alpha === "number") {
    return ` (p=${fmt(p)}, alpha=${fmt(alpha)})`;
  }
  return "";
}

function figureSurvival(tables: Table[], flags: AxisFlags): string {
  const series = groupSeries(tables, "t", (row) => str(row, "experiment"));
  const { x, y } = buildScales(series, flags, "survival");
  const f: Frame = { title: `ball survival${titleSuffix(tables)}`, xLabel: "t", yLabel: "probability", x, y };
  return renderSvg(f, series);
}

function figureSojournCdf(tables: Table[], flags: AxisFlags): string {
  const series = groupSeries(tables, "theta", (row) => str(row, "experiment"));
  // empirical clouds are dense; model curves sparse.  markers only for sparse
  for (const s of series) {
    s.markers = s.points.length <= 40;
  }
  const { x, y } = buildScales(series, flags, "sojourn_cdf");
  const f: Frame = { title: `sojourn CDF${titleSuffix(tables)}`, xLabel: "theta", yLabel: "P(sojourn <= theta)", x, y };
  return renderSvg(f, series);
}

function isFits(contract: Contract): boolean {
  return contract.id === FITS.id;
}

function scalingLabel(row: Row, contract: Contract): string {
  const name = str(row, "experiment");
  if (contract.id === MOMENTS.id) {
    return `${name} beta=${fmt(num(row, "beta"))}`;
  }
  return name;
}

function figureScaling(tables: Table[], flags: AxisFlags): string {
  const mains = tables.filter((t) => !isFits(t.contract));
  const fits = tables.filter((t) => isFits(t.contract));
  if (mains.length === 0) {
    throw new DataError("scaling figure needs at least one data CSV (got only fits files)");
  }

  const acc = new Map<string, SeriesDef>();
  for (const table of mains) {
    for (const row of table.rows) {
      const label = prefixed(mains, table.path, scalingLabel(row, table.contract));
      let s = acc.get(label);
      if (s === undefined) {
        s = { label, sortKey: label, points: [] };
        acc.set(label, s);
      }
      s.points.push({ x: num(row, "t"), y: num(row, "value"), err: optNum(row, "stderr") ?? undefined });
    }
  }
  const defs = [...acc.values()].sort((a, b) => (a.sortKey < b.sortKey ? -1 : 1));
  for (const s of defs) s.points.sort((a, b) => a.x - b.x);

  // reference guides from the fits files: a dashed segment of the
  // predicted slope through the matching series, lifted for visibility
  const notes: Annotation[] = [];
  for (const table of fits) {
    for (const row of table.rows) {
      const pred = optNum(row, "predicted_slope");
      if (pred === null) continue;
      const beta = optNum(row, "beta");
      const wantLabel = beta === null ? str(row, "experiment") : `${str(row, "experiment")} beta=${fmt(beta)}`;
      const match =
        defs.find((s) => s.label === wantLabel || s.label.endsWith(`: ${wantLabel}`)) ?? defs[0]!;
      const tLo = num(row, "t_lo");
      const tHi = num(row, "t_hi");
      const mid = Math.sqrt(tLo * tHi);
      let anchor = match.points[0]!;
      for (const p of match.points) {
        if (Math.abs(Math.log(p.x / mid)) < Math.abs(Math.log(anchor.x / mid))) anchor = p;
      }
      const lift = 1.35;
      notes.push({
        x0: tLo,
        y0: anchor.y * lift * Math.pow(tLo / anchor.x, pred),
        x1: tHi,
        y1: anchor.y * lift * Math.pow(tHi / anchor.x, pred),
        label: `slope ${fmt(pred)}`,
      });
    }
  }

  const ends = notes.flatMap((a) => [{ x: a.x0, y: a.y0 }, { x: a.x1, y: a.y1 }]);
  const { x, y } = buildScales(defs, flags, "scaling", ends);
  const f: Frame = { title: `scaling${titleSuffix(mains)}`, xLabel: "t", yLabel: "value", x, y };
  return renderSvg(f, defs, notes);
}

function figureStable(tables: Table[], flags: AxisFlags): string {
  const gammas = new Set<number>();
  for (const t of tables) for (const row of t.rows) gammas.add(num(row, "gamma"));
  const multi = gammas.size > 1;
  const series = groupSeries(
    tables,
    "t",
    (row) => (multi ? `gamma=${fmt(num(row, "gamma"))} ${str(row, "route")}` : str(row, "route")),
  );
  const { x, y } = buildScales(series, flags, "stable");
  const gLabel = multi ? "" : ` (gamma=${fmt([...gammas][0]!)})`;
  const f: Frame = { title: `one-sided stable density${gLabel}`, xLabel: "t", yLabel: "density", x, y };
  return renderSvg(f, series);
}

function figureSpectral(tables: Table[], flags: AxisFlags): string {
  const acc = new Map<string, SeriesDef>();
  for (const table of tables) {
    for (const row of table.rows) {
      const age = num(row, "t_a");
      const hole = age === 0;
      const label = prefixed(tables, table.path, hole ? "growth (t_a=0)" : `ageing (t=${fmt(num(row, "t"))})`);
      let s = acc.get(label);
      if (s === undefined) {
        s = { label, sortKey: label, points: [], dashed: !hole };
        acc.set(label, s);
      }
      s.points.push({ x: hole ? num(row, "t") : age, y: num(row, "sigma"), err: optNum(row, "stderr") ?? undefined });
    }
  }
  const series = [...acc.values()].sort((a, b) => (a.sortKey < b.sortKey ? -1 : 1));
  for (const s of series) s.points.sort((a, b) => a.x - b.x);
  const { x, y } = buildScales(series, flags, "spectral");
  const f: Frame = { title: "interface width", xLabel: "t (growth) / t_a (ageing)", yLabel: "sigma", x, y };
  return renderSvg(f, series);
}

export function buildFigure(kind: FigureKind, tables: Table[], flags: AxisFlags = {}): string {
  switch (kind) {
    case "survival":
      return figureSurvival(tables, flags);
    case "sojourn_cdf":
      return figureSojournCdf(tables, flags);
    case "scaling":
      return figureScaling(tables, flags);
    case "stable":
      return figureStable(tables, flags);
    case "spectral":
      return figureSpectral(tables, flags);
  }
}
