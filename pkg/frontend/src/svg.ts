/**
 * Minimal deterministic SVG plotting primitives: linear/log scales with
 * round tick positions, axes, polylines, rectangles and swatch legends.
 * Everything is plain string assembly so identical inputs give identical
 * documents.
 */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 10000 || a < 0.01)) return v.toExponential(0).replace("e+", "e");
  return String(Math.round(v * 1000) / 1000);
}

export interface Scale {
  apply(v: number): number;
  ticks(): number[];
  readonly domain: [number, number];
}

export class LinearScale implements Scale {
  constructor(
    public readonly domain: [number, number],
    public readonly range: [number, number],
    private readonly tickCount = 6,
  ) {}

  apply(v: number): number {
    const [d0, d1] = this.domain;
    const [r0, r1] = this.range;
    const t = d1 === d0 ? 0.5 : (v - d0) / (d1 - d0);
    return r0 + t * (r1 - r0);
  }

  ticks(): number[] {
    const [d0, d1] = this.domain;
    const span = d1 - d0;
    if (span <= 0) return [d0];
    const rawStep = span / this.tickCount;
    const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const candidates = [1, 2, 5, 10].map((m) => m * mag);
    const step = candidates.find((s) => span / s <= this.tickCount) ?? candidates[3];
    const out: number[] = [];
    for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-9 * span; v += step) {
      out.push(Math.round(v * 1e9) / 1e9);
    }
    return out;
  }
}

export class LogScale implements Scale {
  constructor(
    public readonly domain: [number, number],
    public readonly range: [number, number],
  ) {
    if (domain[0] <= 0 || domain[1] <= 0) {
      throw new Error(`log scale needs a positive domain, got [${domain}]`);
    }
  }

  apply(v: number): number {
    const [d0, d1] = this.domain;
    const [r0, r1] = this.range;
    const t = (Math.log10(v) - Math.log10(d0)) / (Math.log10(d1) - Math.log10(d0));
    return r0 + t * (r1 - r0);
  }

  ticks(): number[] {
    const out: number[] = [];
    const lo = Math.ceil(Math.log10(this.domain[0]) - 1e-9);
    const hi = Math.floor(Math.log10(this.domain[1]) + 1e-9);
    for (let e = lo; e <= hi; e += 1) out.push(Math.pow(10, e));
    return out;
  }
}

export function line(
  x1: number, y1: number, x2: number, y2: number,
  stroke: string, width = 1, dash = "",
): string {
  const d = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`;
}

export function polyline(
  points: Array<[number, number]>, stroke: string, width = 1.5, dash = "",
): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const d = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`;
}

export function rect(box: Box, fill: string, stroke = "none"): string {
  return `<rect x="${fmt(box.x)}" y="${fmt(box.y)}" width="${fmt(box.width)}" height="${fmt(box.height)}" fill="${fill}" stroke="${stroke}"/>`;
}

export function text(
  x: number, y: number, content: string,
  opts: { size?: number; anchor?: string; fill?: string; rotate?: boolean } = {},
): string {
  const { size = 11, anchor = "middle", fill = "#000000", rotate = false } = opts;
  const transform = rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
  return `<text x="${fmt(x)}" y="${fmt(y)}" ${FONT} font-size="${size}" text-anchor="${anchor}" fill="${fill}"${transform}>${escapeXml(content)}</text>`;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface AxisOptions {
  xLabel: string;
  yLabel: string;
  title?: string;
}

/** Frame, ticks and labels for one panel; returns the SVG fragment. */
export function axes(plot: Box, xScale: Scale, yScale: Scale, opts: AxisOptions): string {
  const parts: string[] = [];
  parts.push(rect(plot, "none", "#000000"));
  for (const t of xScale.ticks()) {
    const px = xScale.apply(t);
    parts.push(line(px, plot.y + plot.height, px, plot.y + plot.height + 4, "#000000"));
    parts.push(text(px, plot.y + plot.height + 16, tickLabel(t)));
  }
  for (const t of yScale.ticks()) {
    const py = yScale.apply(t);
    parts.push(line(plot.x - 4, py, plot.x, py, "#000000"));
    parts.push(text(plot.x - 7, py + 3.5, tickLabel(t), { anchor: "end" }));
  }
  parts.push(text(plot.x + plot.width / 2, plot.y + plot.height + 32, opts.xLabel, { size: 12 }));
  parts.push(
    text(plot.x - 42, plot.y + plot.height / 2, opts.yLabel, { size: 12, rotate: true }),
  );
  if (opts.title) {
    parts.push(text(plot.x + plot.width / 2, plot.y - 8, opts.title, { size: 12 }));
  }
  return parts.join("\n");
}

export function legend(
  x: number, y: number,
  entries: Array<{ label: string; color: string; dash?: string }>,
): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const yy = y + i * 16;
    parts.push(line(x, yy, x + 22, yy, e.color, 2, e.dash ?? ""));
    parts.push(text(x + 28, yy + 3.5, e.label, { anchor: "start", size: 10 }));
  });
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    rect({ x: 0, y: 0, width, height }, "#ffffff"),
    body,
    "</svg>",
  ].join("\n");
}

/** Orange-to-black gradient used for positive speedups. */
export function speedupColor(value: number, max: number): string {
  const t = max > 0 ? Math.max(0, Math.min(1, value / max)) : 0;
  const from = { r: 0xff, g: 0x8c, b: 0x00 };
  const to = { r: 0, g: 0, b: 0 };
  const mix = (a: number, b: number) => Math.round(a + (b - a) * t);
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(mix(from.r, to.r))}${hex(mix(from.g, to.g))}${hex(mix(from.b, to.b))}`;
}

export const WHITE = "#ffffff";
export const GREY = "#bdbdbd";
