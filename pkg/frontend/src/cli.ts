import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";
import { parseCsv } from "./csv.js";
import { populationsFigure, pulsesFigure, speedLimitFigure } from "./charts.js";

const KINDS = ["pulses", "populations", "speedlimit"] as const;
type Kind = (typeof KINDS)[number];

export interface Args {
  kind: Kind;
  inputs: string[];
  out: string;
  threshold: number;
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (!KINDS.includes(kind as Kind)) {
    throw new Error(`usage: figures <${KINDS.join("|")}> --in FILE[,FILE2] --out FILE.svg [--threshold X] [--title T]`);
  }
  let inputs: string[] = [];
  let out = "";
  let threshold = 0.9999;
  let title: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    switch (rest[i]) {
      case "--in":
        inputs = (rest[++i] ?? "").split(",").filter((s) => s.length > 0);
        break;
      case "--out":
        out = rest[++i] ?? "";
        break;
      case "--threshold":
        threshold = Number(rest[++i]);
        break;
      case "--title":
        title = rest[++i];
        break;
      default:
        throw new Error(`unknown argument ${rest[i]}`);
    }
  }
  if (inputs.length === 0 || !out) throw new Error("both --in and --out are required");
  return { kind: kind as Kind, inputs, out, threshold, title };
}

export function render(args: Args): string {
  const tables = args.inputs.map((p) => parseCsv(readFileSync(p, "utf8")));
  switch (args.kind) {
    case "pulses":
      return pulsesFigure(tables[0], args.title ?? "Detuning controls");
    case "populations":
      return populationsFigure(tables[0], args.title ?? "Populations");
    case "speedlimit":
      return speedLimitFigure(
        tables.map((t, i) => ({ label: basename(args.inputs[i], ".csv"), table: t })),
        args.threshold,
        args.title ?? "Speed limit"
      );
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error((e as Error).message);
    return 2;
  }
  try {
    writeFileSync(args.out, render(args));
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
