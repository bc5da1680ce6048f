import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import sharp from "sharp";
import { FigureRecipe, renderFigure } from "./recipes.js";

export interface RenderedPaths {
  svg: string;
  png: string;
}

/** Render a recipe and write both the SVG and its PNG rasterization. */
export async function emitFigure(recipe: FigureRecipe): Promise<RenderedPaths> {
  const svg = renderFigure(recipe);
  const base = recipe.output.replace(/\.(svg|png)$/i, "");
  mkdirSync(dirname(base) || ".", { recursive: true });
  const svgPath = `${base}.svg`;
  const pngPath = `${base}.png`;
  writeFileSync(svgPath, svg, "utf8");
  await sharp(Buffer.from(svg), { density: 144 }).png().toFile(pngPath);
  return { svg: svgPath, png: pngPath };
}
