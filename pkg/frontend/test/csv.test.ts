import { test } from "node:test";
import assert from "node:assert/strict";
import { parseCsv, column, columnsWithPrefix, MissingColumnError } from "../src/csv.js";

test("parses header and numeric rows", () => {
  const t = parseCsv("a,b\n1,2\n3.5,-4e-2\n");
  assert.deepEqual(t.columns, ["a", "b"]);
  assert.deepEqual(t.rows, [
    [1, 2],
    [3.5, -0.04],
  ]);
});

test("column lookup", () => {
  const t = parseCsv("t_ns,p_leak\n0,0.1\n1,0.2\n");
  assert.deepEqual(column(t, "p_leak"), [0.1, 0.2]);
});

test("missing column raises a named error", () => {
  const t = parseCsv("a\n1\n");
  assert.throws(() => column(t, "b"), MissingColumnError);
});

test("ragged rows rejected", () => {
  assert.throws(() => parseCsv("a,b\n1\n"));
});

test("prefix matching keeps file order", () => {
  const t = parseCsv("t_ns,p_0_110,p_leak,other\n0,1,0,0\n");
  assert.deepEqual(columnsWithPrefix(t, "p_"), ["p_0_110", "p_leak"]);
});

test("empty csv rejected", () => {
  assert.throws(() => parseCsv("\n\n"));
});
