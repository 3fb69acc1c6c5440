#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";

import { parseAllocation, parseGraph, parseRiskTable } from "./table.js";
import { resolveStyle } from "./style.js";
import { plotRiskCurves } from "./risk-curves.js";
import { plotGraphAllocation } from "./graph-allocation.js";

export interface CliArgs {
  in: string;
  out: string;
  graph?: string;
  style?: string;
}

/** Render one figure; returns the SVG string it wrote to args.out. */
export function render(args: CliArgs): string {
  const style = resolveStyle(
    args.style === undefined
      ? undefined
      : JSON.parse(readFileSync(args.style, "utf8"))
  );
  const input = readFileSync(args.in, "utf8");
  // a graph turns the input into an allocation file; otherwise it is a
  // risk-curve table
  const svg =
    args.graph === undefined
      ? plotRiskCurves(parseRiskTable(input), style)
      : plotGraphAllocation(
          parseGraph(readFileSync(args.graph, "utf8")),
          parseAllocation(input),
          style
        );
  writeFileSync(args.out, svg);
  return svg;
}

export function runCli(argv: string[]): number {
  const args = yargs(argv)
    .option("in", { type: "string", demandOption: true, describe: "input CSV" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG" })
    .option("graph", { type: "string", describe: "graph JSON (allocation mode)" })
    .option("style", { type: "string", describe: "style override JSON" })
    .strict()
    .exitProcess(false)
    .parseSync();
  try {
    render({ in: args.in, out: args.out, graph: args.graph, style: args.style });
  } catch (e) {
    console.error(`error: ${e instanceof Error ? e.message : e}`);
    return 1;
  }
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isMain) {
  process.exit(runCli(process.argv.slice(2)));
}
