export interface Table {
  columns: string[];
  rows: number[][];
}

export class MissingColumnError extends Error {
  constructor(name: string, available: string[]) {
    super(`missing column "${name}" (file has: ${available.join(", ")})`);
    this.name = "MissingColumnError";
  }
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 1) throw new Error("empty CSV");
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(`row ${i + 1} has ${parts.length} cells, header has ${columns.length}`);
    }
    rows.push(parts.map(Number));
  }
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new MissingColumnError(name, table.columns);
  return table.rows.map((r) => r[idx]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}

/** Column names matching a prefix, in file order. */
export function columnsWithPrefix(table: Table, prefix: string): string[] {
  return table.columns.filter((c) => c.startsWith(prefix));
}
