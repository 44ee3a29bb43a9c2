// Renders every figure that a completed experiment directory supports:
//   pulse_fine.csv -> pulses.svg, trajectory.csv -> populations.svg,
//   sweep.csv (+ optional second dir's sweep.csv) -> speedlimit.svg
import { existsSync, mkdirSync } from "fs";
import { join } from "path";
import { main as renderOne } from "./cli.js";

function run(argv: string[]): number {
  const [expDir, outDir, baselineDir] = argv;
  if (!expDir || !outDir) {
    console.error("usage: figures-all <experiment-dir> <out-dir> [baseline-sweep-dir]");
    return 2;
  }
  mkdirSync(outDir, { recursive: true });
  let rendered = 0;

  const pulseCsv = ["pulse_fine.csv", "pulse_coarse.csv"]
    .map((n) => join(expDir, n))
    .find(existsSync);
  if (pulseCsv) {
    if (renderOne(["pulses", "--in", pulseCsv, "--out", join(outDir, "pulses.svg")]) === 0)
      rendered++;
  }

  const trajCsv = join(expDir, "trajectory.csv");
  if (existsSync(trajCsv)) {
    if (renderOne(["populations", "--in", trajCsv, "--out", join(outDir, "populations.svg")]) === 0)
      rendered++;
  }

  const sweeps = [join(expDir, "sweep.csv")];
  if (baselineDir) sweeps.push(join(baselineDir, "sweep.csv"));
  const present = sweeps.filter(existsSync);
  if (present.length > 0) {
    if (
      renderOne([
        "speedlimit",
        "--in",
        present.join(","),
        "--out",
        join(outDir, "speedlimit.svg"),
      ]) === 0
    )
      rendered++;
  }

  if (rendered === 0) {
    console.error(`no renderable CSVs found in ${expDir}`);
    return 1;
  }
  console.log(`rendered ${rendered} figure(s) into ${outDir}`);
  return 0;
}

process.exit(run(process.argv.slice(2)));
