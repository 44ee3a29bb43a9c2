/** Minimal deterministic SVG line-chart builder (no DOM, no deps). */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
  yMin?: number;
  yMax?: number;
  hLines?: { y: number; label: string }[];
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { top: 34, right: 16, bottom: 44, left: 58 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  const raw = span / Math.max(n - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= n) ?? candidates[candidates.length - 1];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + step * 1e-9; t += step) ticks.push(Number(t.toPrecision(12)));
  return ticks;
}

function fmt(v: number): string {
  if (Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.001)) return v.toExponential(1);
  return Number(v.toPrecision(6)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const allX = spec.series.flatMap((s) => s.x);
  const allY = spec.series.flatMap((s) => s.y);
  const [xLo, xHi] = extent(allX);
  let [yLo, yHi] = extent(allY);
  if (spec.yMin !== undefined) yLo = spec.yMin;
  if (spec.yMax !== undefined) yHi = spec.yMax;
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }

  const sx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`
  );

  for (const t of niceTicks(xLo, xHi)) {
    const x = sx(t);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" y2="${MARGIN.top + plotH}" stroke="#e0e0e0"/>`,
      `<text x="${x.toFixed(2)}" y="${MARGIN.top + plotH + 16}" text-anchor="middle" font-size="11">${fmt(t)}</text>`
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${MARGIN.left + plotW}" y2="${y.toFixed(2)}" stroke="#e0e0e0"/>`,
      `<text x="${MARGIN.left - 6}" y="${(y + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmt(t)}</text>`
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444"/>`
  );

  for (const h of spec.hLines ?? []) {
    const y = sy(h.y);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${MARGIN.left + plotW}" y2="${y.toFixed(2)}" stroke="#999" stroke-dasharray="6 3"/>`,
      `<text x="${MARGIN.left + plotW - 4}" y="${(y - 4).toFixed(2)}" text-anchor="end" font-size="10" fill="#666">${esc(h.label)}</text>`
    );
  }

  for (const s of spec.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (!Number.isFinite(s.x[i]) || !Number.isFinite(s.y[i])) continue;
      pts.push(`${sx(s.x[i]).toFixed(2)},${sy(s.y[i]).toFixed(2)}`);
    }
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`
    );
  }

  spec.series.forEach((s, i) => {
    const lx = MARGIN.left + 10;
    const ly = MARGIN.top + 14 + i * 15;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 18}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${lx + 24}" y="${ly}" font-size="11">${esc(s.label)}</text>`
    );
  });

  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" text-anchor="middle" font-size="12">${esc(spec.xLabel)}</text>`,
    `<text x="14" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
    `</svg>`
  );
  return parts.join("\n") + "\n";
}
