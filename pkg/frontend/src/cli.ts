#!/usr/bin/env node
/**
 * Usage: exstar-figures <figure-id> --input data.csv [--input more.csv] --out path/figure
 *
 * Renders one figure analogue from simulator CSV output and writes
 * <out>.svg and <out>.png.  fig3 and fig6 accept multiple --input files
 * (one curve set / panel each); the others take exactly one.
 */

import { SchemaError } from "./csv.js";
import { FIGURE_IDS, FigureId, FigureRecipe } from "./recipes.js";
import { emitFigure } from "./render.js";

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    `usage: exstar-figures <${FIGURE_IDS.join("|")}> --input <csv> [--input <csv> ...] --out <path>`,
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): FigureRecipe {
  if (argv.length === 0) usage();
  const [id, ...rest] = argv;
  if (!(FIGURE_IDS as readonly string[]).includes(id)) usage(`unknown figure id '${id}'`);
  const inputs: string[] = [];
  let output: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) usage(`missing value for ${flag}`);
    if (flag === "--input") inputs.push(value);
    else if (flag === "--out") output = value;
    else usage(`unknown flag ${flag}`);
  }
  if (inputs.length === 0) usage("at least one --input is required");
  if (!output) usage("--out is required");
  return { id: id as FigureId, inputs, output };
}

async function main(): Promise<void> {
  const recipe = parseArgs(process.argv.slice(2));
  try {
    const paths = await emitFigure(recipe);
    console.log(`wrote ${paths.svg} and ${paths.png}`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === new URL(`file://${process.argv[1]}`).href) {
  main();
}
