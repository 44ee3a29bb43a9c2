import { MissingColumnError, Table, column, columnsWithPrefix } from "./csv.js";
import { PALETTE, Series, renderChart } from "./svg.js";

const PULSE_COLUMNS = ["delta_P_GHz", "delta_S1_GHz", "delta_S2_GHz"];

/** Control waveforms over time (from pulse_coarse.csv / pulse_fine.csv). */
export function pulsesFigure(table: Table, title = "Detuning controls"): string {
  const t = column(table, "t_ns");
  const series: Series[] = [];
  PULSE_COLUMNS.forEach((name, i) => {
    if (table.columns.includes(name)) {
      series.push({
        label: name.replace("delta_", "").replace("_GHz", ""),
        x: t,
        y: column(table, name),
        color: PALETTE[i],
      });
    }
  });
  if (series.length === 0) {
    throw new MissingColumnError(PULSE_COLUMNS[0], table.columns);
  }
  return renderChart({
    title,
    xLabel: "t (ns)",
    yLabel: "detuning / 2π (GHz)",
    series,
  });
}

/** Population dynamics (from trajectory.csv); plots every p_* column present. */
export function populationsFigure(table: Table, title = "Populations"): string {
  const t = column(table, "t_ns");
  const names = columnsWithPrefix(table, "p_");
  if (names.length === 0) throw new MissingColumnError("p_*", table.columns);
  const series: Series[] = names.map((name, i) => ({
    label: name.slice(2).replace("_", "|"),
    x: t,
    y: column(table, name),
    color: PALETTE[i % PALETTE.length],
    dash: name === "p_leak" || name === "p_other" ? "4 3" : undefined,
  }));
  return renderChart({
    title,
    xLabel: "t (ns)",
    yLabel: "population",
    series,
    yMin: 0,
    yMax: 1,
  });
}

export interface SweepInput {
  label: string;
  table: Table;
}

/** Best fidelity vs gate time, optionally several sweeps overlaid. */
export function speedLimitFigure(
  sweeps: SweepInput[],
  threshold = 0.9999,
  title = "Speed limit"
): string {
  if (sweeps.length === 0) throw new Error("no sweep data given");
  const series: Series[] = sweeps.map((s, i) => ({
    label: s.label,
    x: column(s.table, "t_g_ns"),
    y: column(s.table, "best_fidelity"),
    color: PALETTE[i % PALETTE.length],
  }));
  return renderChart({
    title,
    xLabel: "gate time (ns)",
    yLabel: "best fidelity",
    series,
    hLines: [{ y: threshold, label: `Φ = ${threshold}` }],
  });
}
