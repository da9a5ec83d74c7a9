import { existsSync, writeFileSync } from "fs";
import yargs from "yargs";

import { SchemaError } from "./csv";
import { decayOption, heatmapOption, sweepOption } from "./figures";
import { renderSvg } from "./render";

export const KINDS = ["decay", "heatmap", "sweep"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureRequest {
  kind: Kind;
  inputs: string[];
  out: string;
  force: boolean;
  slopes: number[];
}

/** Build and write one figure; inputs are never modified. */
export function renderFigure(request: FigureRequest): void {
  if (existsSync(request.out) && !request.force) {
    throw new Error(`refusing to overwrite ${request.out} (use --force)`);
  }
  let option;
  switch (request.kind) {
    case "decay":
      option = decayOption(request.inputs, request.slopes);
      break;
    case "heatmap":
      option = heatmapOption(only(request.inputs));
      break;
    case "sweep":
      option = sweepOption(only(request.inputs));
      break;
  }
  writeFileSync(request.out, renderSvg(option));
}

function only(inputs: string[]): string {
  if (inputs.length !== 1) {
    throw new SchemaError(`this figure kind takes exactly one input, got ${inputs.length}`);
  }
  return inputs[0];
}

function parseSlopes(raw: string): number[] {
  const slopes = raw
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map(Number);
  if (slopes.some((s) => !Number.isFinite(s))) {
    throw new Error(`invalid --slopes value: ${raw}`);
  }
  return slopes;
}

export function runCli(argv: string[]): number {
  try {
    const args = yargs(argv)
    .option("kind", { choices: KINDS, demandOption: true, describe: "figure kind" })
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input CSV path(s), comma-separated for overlaid decay traces",
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("force", { type: "boolean", default: false, describe: "overwrite existing output" })
    .option("slopes", {
      type: "string",
      default: "-2,-1",
      describe: "reference slopes for the decay guides",
    })
    .strict()
    .exitProcess(false)
      .fail((msg: string, err: Error | undefined) => {
        throw err ?? new Error(msg);
      })
      .parseSync();

    renderFigure({
      kind: args.kind as Kind,
      inputs: String(args.in)
        .split(",")
        .map((s: string) => s.trim())
        .filter((s: string) => s.length > 0),
      out: String(args.out),
      force: Boolean(args.force),
      slopes: parseSlopes(String(args.slopes)),
    });
    process.stdout.write(`${args.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`plotkit: ${(err as Error).message}\n`);
    return err instanceof SchemaError ? 2 : 1;
  }
}

if (require.main === module) {
  process.exitCode = runCli(process.argv.slice(2));
}
