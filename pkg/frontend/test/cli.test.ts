import { test } from "node:test";
import assert from "node:assert/strict";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { main, parseArgs } from "../src/cli.js";

function tmpFile(name: string, content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "zpfig-"));
  const p = join(dir, name);
  writeFileSync(p, content);
  return p;
}

test("parseArgs splits comma-separated inputs", () => {
  const args = parseArgs(["speedlimit", "--in", "a.csv,b.csv", "--out", "o.svg", "--threshold", "0.999"]);
  assert.deepEqual(args.inputs, ["a.csv", "b.csv"]);
  assert.equal(args.threshold, 0.999);
});

test("parseArgs rejects unknown kinds", () => {
  assert.throws(() => parseArgs(["scatter", "--in", "a", "--out", "b"]));
});

test("cli renders a populations svg end to end", () => {
  const input = tmpFile(
    "trajectory.csv",
    "t_ns,p_0_110,p_leak\n0,1,0\n0.1,0.8,0.1\n0.2,0.6,0.05\n"
  );
  const out = input.replace("trajectory.csv", "populations.svg");
  const code = main(["populations", "--in", input, "--out", out]);
  assert.equal(code, 0);
  const svg = readFileSync(out, "utf8");
  assert.match(svg, /^<svg /);
  assert.match(svg, /population/);
});

test("cli exits 2 on usage errors", () => {
  assert.equal(main(["populations"]), 2);
});

test("cli exits 1 on missing required column", () => {
  const input = tmpFile("bad.csv", "x,y\n1,2\n");
  const out = input.replace("bad.csv", "o.svg");
  assert.equal(main(["populations", "--in", input, "--out", out]), 1);
});
