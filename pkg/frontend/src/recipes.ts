/**
 * Figure recipes over the simulator's CSV outputs.
 *
 * fig2a  absorption time vs defect, one curve per branch length
 * fig2b  speedup heatmap on the (L, N) grid with the critical-length curve
 * fig3   absorbed-population time series comparison
 * fig4   absorption time vs defect for several dephasing rates (two panels)
 * fig6   absorption time vs dephasing with the analytic rate-model estimates
 *
 * Each renderer validates its declared columns up front (SchemaError names
 * the offender) and assembles a deterministic SVG document.
 */

import { basename } from "node:path";
import { isTrue, num, readCsv, requireColumns, SchemaError, Table } from "./csv.js";
import {
  axes,
  Box,
  document,
  GREY,
  legend,
  line,
  LinearScale,
  LogScale,
  polyline,
  rect,
  Scale,
  speedupColor,
  text,
  WHITE,
} from "./svg.js";

export const FIGURE_IDS = ["fig2a", "fig2b", "fig3", "fig4", "fig6"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface FigureRecipe {
  id: FigureId;
  inputs: string[];
  output: string;
}

const CRITICAL_LENGTH_COEFF = 12.5;

function criticalLength(n: number): number {
  return CRITICAL_LENGTH_COEFF / Math.log(n);
}

const PALETTE = ["#000000", "#8c510a", "#d73027", "#fdae61", "#7b3294", "#008837"];

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function finitePositive(values: number[]): number[] {
  return values.filter((v) => Number.isFinite(v) && v > 0);
}

function padDomain(lo: number, hi: number, frac = 0.05): [number, number] {
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - frac * span, hi + frac * span];
}

function singleInput(recipe: FigureRecipe): Table {
  if (recipe.inputs.length !== 1) {
    throw new SchemaError(`${recipe.id}: expected exactly one input CSV, got ${recipe.inputs.length}`);
  }
  return readCsv(recipe.inputs[0]);
}

// ---------------------------------------------------------------- fig2a --

function renderFig2a(recipe: FigureRecipe): string {
  const table = singleInput(recipe);
  requireColumns(table, ["N", "L", "J", "delta", "tau", "converged"], recipe.id);
  const rows = table.rows.filter((r) => isTrue(r, "converged"));
  if (rows.length === 0) throw new SchemaError(`${recipe.id}: no converged rows in ${table.path}`);

  const lengths = uniqueSorted(rows.map((r) => num(r, "L")));
  const taus = finitePositive(rows.map((r) => num(r, "tau")));
  const deltas = rows.map((r) => num(r, "delta"));
  const plot: Box = { x: 60, y: 30, width: 460, height: 330 };
  const xs = new LinearScale(padDomain(Math.min(...deltas), Math.max(...deltas), 0.02), [
    plot.x,
    plot.x + plot.width,
  ]);
  const ys = new LogScale([Math.min(...taus) * 0.8, Math.max(...taus) * 1.3], [
    plot.y + plot.height,
    plot.y,
  ]);

  const parts: string[] = [];
  const optimal = Math.sqrt(num(rows[0], "N") - 1) * num(rows[0], "J");
  parts.push(
    line(xs.apply(optimal), plot.y, xs.apply(optimal), plot.y + plot.height, "#1f6fd4", 1.5, "6 4"),
  );
  lengths.forEach((l, i) => {
    const pts = rows
      .filter((r) => num(r, "L") === l)
      .map((r): [number, number] => [xs.apply(num(r, "delta")), ys.apply(num(r, "tau"))]);
    parts.push(polyline(pts, PALETTE[i % PALETTE.length], 1.8));
  });
  parts.push(axes(plot, xs, ys, { xLabel: "defect energy", yLabel: "absorption time" }));
  parts.push(
    legend(plot.x + plot.width + 14, plot.y + 12, [
      ...lengths.map((l, i) => ({ label: `L = ${l}`, color: PALETTE[i % PALETTE.length] })),
      { label: "sqrt(N-1) J", color: "#1f6fd4", dash: "6 4" },
    ]),
  );
  return document(640, 410, parts.join("\n"));
}

// ---------------------------------------------------------------- fig2b --

interface HeatCell {
  n: number;
  l: number;
  s: number;
}

function heatmapBody(
  cells: HeatCell[],
  plot: Box,
  title: string,
): string {
  const ns = uniqueSorted(cells.map((c) => c.n));
  const ls = uniqueSorted(cells.map((c) => c.l));
  const xs = new LinearScale([ls[0] - 0.5, ls[ls.length - 1] + 0.5], [plot.x, plot.x + plot.width]);
  const ys = new LinearScale([ns[0] - 0.5, ns[ns.length - 1] + 0.5], [plot.y + plot.height, plot.y]);
  const cellW = plot.width / ls.length;
  const cellH = plot.height / ns.length;
  const maxS = Math.max(0, ...cells.map((c) => c.s).filter(Number.isFinite));

  const parts: string[] = [];
  for (const cell of cells) {
    let fill: string;
    if (cell.l > criticalLength(cell.n)) {
      fill = GREY; // outside the region where the optimization was ever present
    } else if (!Number.isFinite(cell.s) || cell.s <= 0) {
      fill = WHITE; // optimization lost
    } else {
      fill = speedupColor(cell.s, maxS);
    }
    parts.push(
      rect(
        {
          x: xs.apply(cell.l) - cellW / 2,
          y: ys.apply(cell.n) - cellH / 2,
          width: cellW,
          height: cellH,
        },
        fill,
        "#dddddd",
      ),
    );
  }
  // critical-length overlay, sampled densely in N
  const curve: Array<[number, number]> = [];
  for (let n = ns[0]; n <= ns[ns.length - 1] + 1e-9; n += 0.05) {
    const l = criticalLength(n);
    if (l >= ls[0] - 0.5 && l <= ls[ls.length - 1] + 0.5) {
      curve.push([xs.apply(l), ys.apply(n)]);
    }
  }
  if (curve.length > 1) parts.push(polyline(curve, "#d62728", 2, "7 4"));
  parts.push(axes(plot, xs, ys, { xLabel: "branch length L", yLabel: "branches N", title }));
  return parts.join("\n");
}

function renderFig2b(recipe: FigureRecipe): string {
  const table = singleInput(recipe);
  requireColumns(table, ["N", "L", "speedup"], recipe.id);
  const cells = table.rows.map((r) => ({ n: num(r, "N"), l: num(r, "L"), s: num(r, "speedup") }));
  const plot: Box = { x: 70, y: 30, width: 430, height: 330 };
  const body = heatmapBody(cells, plot, "speedup of the tuned defect");
  const note = text(plot.x + plot.width / 2, 400, "white: no speedup; grey: beyond the critical length", {
    size: 10,
    fill: "#555555",
  });
  return document(560, 420, body + "\n" + note);
}

// ----------------------------------------------------------------- fig3 --

function seriesLabel(path: string): string {
  return basename(path).replace(/\.csv$/i, "");
}

function renderFig3(recipe: FigureRecipe): string {
  if (recipe.inputs.length === 0) throw new SchemaError("fig3: needs at least one series CSV");
  const tables = recipe.inputs.map(readCsv);
  for (const t of tables) requireColumns(t, ["time", "p_absorbed"], recipe.id);

  const tMax = Math.max(...tables.map((t) => Math.max(...t.rows.map((r) => num(r, "time")))));
  const plot: Box = { x: 60, y: 30, width: 440, height: 320 };
  const xs = new LinearScale([0, tMax], [plot.x, plot.x + plot.width]);
  const ys = new LinearScale([0, 1.02], [plot.y + plot.height, plot.y]);

  const parts: string[] = [];
  parts.push(line(plot.x, ys.apply(0.5), plot.x + plot.width, ys.apply(0.5), "#999999", 1, "3 3"));
  const entries: Array<{ label: string; color: string; dash?: string }> = [];
  tables.forEach((t, i) => {
    const label = seriesLabel(t.path);
    const dashed = /star/i.test(label);
    const color = /reference|gamma0\b/i.test(label) ? "#000000" : PALETTE[(i % 4) + 2] ?? "#d73027";
    const pts = t.rows.map(
      (r): [number, number] => [xs.apply(num(r, "time")), ys.apply(num(r, "p_absorbed"))],
    );
    parts.push(polyline(pts, color, 1.8, dashed ? "6 4" : ""));
    entries.push({ label, color, dash: dashed ? "6 4" : undefined });
  });
  parts.push(axes(plot, xs, ys, { xLabel: "time", yLabel: "absorbed population" }));
  parts.push(legend(plot.x + plot.width + 14, plot.y + 12, entries));
  return document(700, 400, parts.join("\n"));
}

// ----------------------------------------------------------------- fig4 --

function renderFig4(recipe: FigureRecipe): string {
  const table = singleInput(recipe);
  requireColumns(table, ["kind", "gamma", "delta", "tau", "converged"], recipe.id);
  const rows = table.rows.filter((r) => isTrue(r, "converged"));
  if (rows.length === 0) throw new SchemaError(`${recipe.id}: no converged rows in ${table.path}`);

  const kinds = [...new Set(rows.map((r) => r.kind))].sort();
  const gammas = uniqueSorted(rows.map((r) => num(r, "gamma")));
  const width = 80 + kinds.length * 360 + 110;
  const parts: string[] = [];
  kinds.forEach((kind, panel) => {
    const sub = rows.filter((r) => r.kind === kind);
    const plot: Box = { x: 60 + panel * 360, y: 30, width: 310, height: 320 };
    const deltas = sub.map((r) => num(r, "delta"));
    const taus = finitePositive(sub.map((r) => num(r, "tau")));
    const xs = new LinearScale(padDomain(Math.min(...deltas), Math.max(...deltas), 0.02), [
      plot.x,
      plot.x + plot.width,
    ]);
    const ys = new LogScale([Math.min(...taus) * 0.8, Math.max(...taus) * 1.3], [
      plot.y + plot.height,
      plot.y,
    ]);
    gammas.forEach((g, i) => {
      const pts = sub
        .filter((r) => num(r, "gamma") === g)
        .map((r): [number, number] => [xs.apply(num(r, "delta")), ys.apply(num(r, "tau"))]);
      if (pts.length === 0) return;
      const color = g === 0 ? "#000000" : PALETTE[(i % 4) + 2] ?? "#d73027";
      parts.push(polyline(pts, color, 1.8, g === 0 ? "6 4" : ""));
    });
    parts.push(
      axes(plot, xs, ys, { xLabel: "defect energy", yLabel: panel === 0 ? "absorption time" : "", title: kind }),
    );
  });
  parts.push(
    legend(
      70 + kinds.length * 360,
      42,
      gammas.map((g, i) => ({
        label: `dephasing ${g}`,
        color: g === 0 ? "#000000" : PALETTE[(i % 4) + 2] ?? "#d73027",
        dash: g === 0 ? "6 4" : undefined,
      })),
    ),
  );
  return document(width, 400, parts.join("\n"));
}

// ----------------------------------------------------------------- fig6 --

const FIG6_COLUMNS = ["gamma", "tau_quantum", "tau_closed_form", "tau_inverse", "tau_wtd"];

function fig6Panel(table: Table, plot: Box, withLegend: boolean): string {
  const rows = table.rows;
  const gammas = finitePositive(rows.map((r) => num(r, "gamma")));
  const allTaus = finitePositive(
    rows.flatMap((r) => [num(r, "tau_quantum"), num(r, "tau_closed_form")]),
  );
  const xs = new LogScale([Math.min(...gammas), Math.max(...gammas)], [plot.x, plot.x + plot.width]);
  const ys = new LinearScale(
    [0, Math.max(...allTaus) * 1.1],
    [plot.y + plot.height, plot.y],
  );

  const parts: string[] = [];
  // weak / moderate / strong dephasing bands
  const bands: Array<[number, number, string]> = [
    [xs.domain[0], 0.1, "#ffffff"],
    [0.1, 10.0, "#ebebeb"],
    [10.0, xs.domain[1], "#d4d4d4"],
  ];
  for (const [lo, hi, fill] of bands) {
    if (hi <= xs.domain[0] || lo >= xs.domain[1]) continue;
    const x0 = xs.apply(Math.max(lo, xs.domain[0]));
    const x1 = xs.apply(Math.min(hi, xs.domain[1]));
    parts.push(rect({ x: x0, y: plot.y, width: x1 - x0, height: plot.height }, fill));
  }

  const curve = (column: string, color: string, widthPx: number, dash = "") =>
    polyline(
      rows
        .filter((r) => Number.isFinite(num(r, column)) && num(r, "gamma") > 0)
        .map((r): [number, number] => [xs.apply(num(r, "gamma")), ys.apply(num(r, column))]),
      color,
      widthPx,
      dash,
    );
  parts.push(curve("tau_closed_form", "#d62728", 2));
  parts.push(curve("tau_inverse", "#1f6fd4", 1.2, "5 4"));
  parts.push(curve("tau_wtd", "#2ca02c", 1.2, "2 3"));
  parts.push(curve("tau_quantum", "#000000", 2));
  parts.push(axes(plot, xs, ys, { xLabel: "dephasing rate", yLabel: "absorption time", title: seriesLabel(table.path) }));
  if (withLegend) {
    parts.push(
      legend(plot.x + 10, plot.y + 14, [
        { label: "simulation", color: "#000000" },
        { label: "rate model (closed form)", color: "#d62728" },
        { label: "rate model (inverse)", color: "#1f6fd4", dash: "5 4" },
        { label: "rate model (waiting time)", color: "#2ca02c", dash: "2 3" },
      ]),
    );
  }
  return parts.join("\n");
}

function renderFig6(recipe: FigureRecipe): string {
  if (recipe.inputs.length === 0) throw new SchemaError("fig6: needs at least one input CSV");
  const tables = recipe.inputs.map(readCsv);
  for (const t of tables) requireColumns(t, FIG6_COLUMNS, recipe.id);
  const cols = Math.min(2, tables.length);
  const rowsOfPanels = Math.ceil(tables.length / cols);
  const parts: string[] = [];
  tables.forEach((t, i) => {
    const plot: Box = {
      x: 60 + (i % cols) * 380,
      y: 30 + Math.floor(i / cols) * 300,
      width: 330,
      height: 240,
    };
    parts.push(fig6Panel(t, plot, i === 0));
  });
  return document(60 + cols * 380, 60 + rowsOfPanels * 300, parts.join("\n"));
}

// -------------------------------------------------------------- registry --

const RENDERERS: Record<FigureId, (recipe: FigureRecipe) => string> = {
  fig2a: renderFig2a,
  fig2b: renderFig2b,
  fig3: renderFig3,
  fig4: renderFig4,
  fig6: renderFig6,
};

export function renderFigure(recipe: FigureRecipe): string {
  const renderer = RENDERERS[recipe.id];
  if (!renderer) {
    throw new SchemaError(`unknown figure id '${recipe.id}' (choose from ${FIGURE_IDS.join(", ")})`);
  }
  return renderer(recipe);
}
