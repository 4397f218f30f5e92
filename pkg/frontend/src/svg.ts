/**
 * Deterministic SVG primitives: scales, ticks, and the figure frame.
 *
 * No dates, no randomness, fixed number formatting, so re-rendering the
 * same inputs yields a byte-identical file.
 */

import { DataError } from "./csv.js";

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 72, right: 24, top: 34, bottom: 52 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

/** Stable short form: up to 6 significant digits, JS canonical rendering. */
export function fmt(v: number): string {
  return String(Number(v.toPrecision(6)));
}

/** Coordinates always get 2 decimals; avoids "-0.00". */
function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  map(v: number): number;
  ticks(): number[];
  log: boolean;
  lo: number;
  hi: number;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const base = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (base * m >= raw) return base * m;
  }
  return base * 10;
}

export function linScale(lo: number, hi: number, r0: number, r1: number): Scale {
  if (!(hi > lo)) {
    // degenerate domain: pad symmetrically
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.5;
    lo -= pad;
    hi += pad;
  }
  const k = (r1 - r0) / (hi - lo);
  return {
    map: (v) => r0 + (v - lo) * k,
    log: false,
    lo,
    hi,
    ticks() {
      const step = niceStep(hi - lo, 6);
      const first = Math.ceil(lo / step) * step;
      const out: number[] = [];
      for (let v = first; v <= hi + step * 1e-9; v += step) {
        out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
      }
      return out;
    },
  };
}

export function logScale(lo: number, hi: number, r0: number, r1: number): Scale {
  if (!(lo > 0)) {
    throw new DataError(`log axis needs positive bounds, got [${lo}, ${hi}]`);
  }
  if (!(hi > lo)) {
    lo /= 2;
    hi *= 2;
  }
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const k = (r1 - r0) / (lb - la);
  return {
    map: (v) => r0 + (Math.log10(v) - la) * k,
    log: true,
    lo,
    hi,
    ticks() {
      const out: number[] = [];
      const d0 = Math.ceil(la - 1e-9);
      const d1 = Math.floor(lb + 1e-9);
      const mantissas = d1 - d0 <= 1 ? [1, 2, 5] : [1];
      for (let d = d0 - 1; d <= d1 + 1; d++) {
        for (const m of mantissas) {
          const v = m * Math.pow(10, d);
          if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push(v);
        }
      }
      return out.sort((a, b) => a - b);
    },
  };
}

/** Extends [lo, hi] by 4% on each side (multiplicatively when log). */
export function padDomain(lo: number, hi: number, log: boolean): [number, number] {
  if (log) {
    const f = Math.pow(hi / lo, 0.04);
    return [lo / f, hi * f];
  }
  const pad = (hi - lo) * 0.04;
  return [lo - pad, hi + pad];
}

export interface Series {
  label: string;
  points: { x: number; y: number; err?: number }[];
  /** draw connecting line (default true) */
  line?: boolean;
  /** draw point markers (default: only when few points) */
  markers?: boolean;
  dashed?: boolean;
}

export interface Annotation {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  label: string;
}

export interface Frame {
  title: string;
  xLabel: string;
  yLabel: string;
  x: Scale;
  y: Scale;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function polyline(pts: { x: number; y: number }[], x: Scale, y: Scale): string {
  return pts.map((p, i) => `${i === 0 ? "M" : "L"}${px(x.map(p.x))},${px(y.map(p.y))}`).join("");
}

function axisParts(f: Frame): string[] {
  const out: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  out.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#000" stroke-width="1"/>`);

  for (const t of f.x.ticks()) {
    const xp = px(f.x.map(t));
    out.push(`<line x1="${xp}" y1="${y0}" x2="${xp}" y2="${y0 + 5}" stroke="#000" stroke-width="1"/>`);
    out.push(`<line x1="${xp}" y1="${y1}" x2="${xp}" y2="${y0}" stroke="#ddd" stroke-width="0.5"/>`);
    out.push(`<text x="${xp}" y="${y0 + 18}" text-anchor="middle" font-size="11">${esc(fmt(t))}</text>`);
  }
  for (const t of f.y.ticks()) {
    const yp = px(f.y.map(t));
    out.push(`<line x1="${x0 - 5}" y1="${yp}" x2="${x0}" y2="${yp}" stroke="#000" stroke-width="1"/>`);
    out.push(`<line x1="${x0}" y1="${yp}" x2="${x1}" y2="${yp}" stroke="#ddd" stroke-width="0.5"/>`);
    out.push(`<text x="${x0 - 8}" y="${yp}" text-anchor="end" dominant-baseline="middle" font-size="11">${esc(fmt(t))}</text>`);
  }

  out.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${esc(f.xLabel)}</text>`);
  out.push(`<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(f.yLabel)}</text>`);
  out.push(`<text x="${(x0 + x1) / 2}" y="${MARGIN.top - 12}" text-anchor="middle" font-size="14" font-weight="bold">${esc(f.title)}</text>`);
  return out;
}

/** Assemble the full document.  Series order fixes color assignment. */
export function renderSvg(f: Frame, series: Series[], notes: Annotation[] = []): string {
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#fff"/>`);
  parts.push(...axisParts(f));

  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    const pts = s.points;
    if (pts.length === 0) return;
    const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
    if (s.line !== false && pts.length > 1) {
      parts.push(`<path d="${polyline(pts, f.x, f.y)}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`);
    }
    const markers = s.markers ?? pts.length <= 40;
    if (markers) {
      for (const p of pts) {
        parts.push(`<circle cx="${px(f.x.map(p.x))}" cy="${px(f.y.map(p.y))}" r="2.6" fill="${color}"/>`);
      }
    }
    for (const p of pts) {
      if (p.err === undefined || !(p.err > 0)) continue;
      const yLo = p.y - p.err;
      const yHi = p.y + p.err;
      if (f.y.log && !(yLo > 0)) continue;
      parts.push(
        `<line x1="${px(f.x.map(p.x))}" y1="${px(f.y.map(yLo))}" x2="${px(f.x.map(p.x))}" y2="${px(f.y.map(yHi))}" stroke="${color}" stroke-width="1"/>`,
      );
    }
  });

  for (const a of notes) {
    parts.push(
      `<line x1="${px(f.x.map(a.x0))}" y1="${px(f.y.map(a.y0))}" x2="${px(f.x.map(a.x1))}" y2="${px(f.y.map(a.y1))}" stroke="#444" stroke-width="1.2" stroke-dasharray="8,5"/>`,
    );
    parts.push(
      `<text x="${px(f.x.map(a.x1))}" y="${px(f.y.map(a.y1) - 6)}" text-anchor="end" font-size="11" fill="#444">${esc(a.label)}</text>`,
    );
  }

  // legend, top right inside the frame
  const lx = WIDTH - MARGIN.right - 10;
  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    const ly = MARGIN.top + 16 + idx * 16;
    parts.push(`<line x1="${lx - 150}" y1="${ly - 4}" x2="${lx - 126}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${s.dashed ? ` stroke-dasharray="6,4"` : ""}/>`);
    parts.push(`<text x="${lx - 120}" y="${ly}" font-size="11">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
