import type { FigureData, PanelData, SeriesData } from "./figure.js";

const PANEL_W = 360;
const PANEL_H = 280;
const MARGIN = { top: 36, right: 16, bottom: 46, left: 58 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

interface Range {
  lo: number;
  hi: number;
}

function fmt(x: number): string {
  // fixed precision keeps output byte-stable across runs
  return Number.isInteger(x) ? String(x) : x.toPrecision(6);
}

function niceTicks(range: Range, count = 5): number[] {
  const span = range.hi - range.lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const scaled = span / count / step;
  const unit = scaled >= 5 ? 10 : scaled >= 2 ? 5 : scaled >= 1 ? 2 : 1;
  const tick = unit * step;
  const first = Math.ceil(range.lo / tick) * tick;
  const ticks: number[] = [];
  for (let v = first; v <= range.hi + 1e-12; v += tick) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function dataRange(panels: PanelData[]): { x: Range; y: Range } {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const panel of panels) {
    for (const s of panel.series) {
      for (let i = 0; i < s.epochs.length; i++) {
        xLo = Math.min(xLo, s.epochs[i]);
        xHi = Math.max(xHi, s.epochs[i]);
        yLo = Math.min(yLo, s.mean[i] - s.ci95[i]);
        yHi = Math.max(yHi, s.mean[i] + s.ci95[i]);
      }
    }
  }
  if (!Number.isFinite(xLo)) {
    throw new Error("no finite data points to plot");
  }
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  return { x: { lo: xLo, hi: xHi }, y: { lo: yLo, hi: yHi } };
}

function scale(value: number, from: Range, lo: number, hi: number): number {
  const t = (value - from.lo) / (from.hi - from.lo || 1);
  return lo + t * (hi - lo);
}

function seriesPaths(s: SeriesData, x: Range, y: Range, color: string): string {
  const px = (v: number) => fmt(scale(v, x, MARGIN.left, PANEL_W - MARGIN.right));
  const py = (v: number) => fmt(scale(v, y, PANEL_H - MARGIN.bottom, MARGIN.top));
  const upper = s.epochs.map((e, i) => `${px(e)},${py(s.mean[i] + s.ci95[i])}`);
  const lower = s.epochs.map((e, i) => `${px(e)},${py(s.mean[i] - s.ci95[i])}`).reverse();
  const band = `<polygon points="${upper.join(" ")} ${lower.join(" ")}" fill="${color}" opacity="0.18" stroke="none"/>`;
  const line = s.epochs.map((e, i) => `${px(e)},${py(s.mean[i])}`).join(" ");
  return `${band}\n<polyline points="${line}" fill="none" stroke="${color}" stroke-width="1.6"/>`;
}

function renderPanel(
  panel: PanelData,
  x: Range,
  y: Range,
  xLabel: string,
  yLabel: string,
  offset: number
): string {
  const parts: string[] = [`<g transform="translate(${offset},0)" class="panel">`];
  const left = MARGIN.left;
  const right = PANEL_W - MARGIN.right;
  const top = MARGIN.top;
  const bottom = PANEL_H - MARGIN.bottom;
  parts.push(
    `<rect x="${left}" y="${top}" width="${right - left}" height="${bottom - top}" fill="none" stroke="#444"/>`
  );
  for (const t of niceTicks(x)) {
    const px = fmt(scale(t, x, left, right));
    parts.push(`<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 4}" stroke="#444"/>`);
    parts.push(
      `<text x="${px}" y="${bottom + 16}" font-size="10" text-anchor="middle">${fmt(t)}</text>`
    );
  }
  for (const t of niceTicks(y)) {
    const py = fmt(scale(t, y, bottom, top));
    parts.push(`<line x1="${left - 4}" y1="${py}" x2="${left}" y2="${py}" stroke="#444"/>`);
    parts.push(
      `<text x="${left - 7}" y="${py}" font-size="10" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`
    );
  }
  panel.series.forEach((s, i) => {
    parts.push(seriesPaths(s, x, y, COLORS[i % COLORS.length]));
  });
  parts.push(
    `<text x="${(left + right) / 2}" y="18" font-size="12" text-anchor="middle" font-weight="bold">${panel.key}</text>`
  );
  parts.push(
    `<text x="${(left + right) / 2}" y="${PANEL_H - 10}" font-size="11" text-anchor="middle">${xLabel}</text>`
  );
  parts.push(
    `<text transform="translate(14,${(top + bottom) / 2}) rotate(-90)" font-size="11" text-anchor="middle">${yLabel}</text>`
  );
  parts.push("</g>");
  return parts.join("\n");
}

/** Render the whole figure as standalone SVG markup. */
export function renderSvg(figure: FigureData, xLabel?: string, yLabel?: string): string {
  const { x, y } = dataRange(figure.panels);
  const legendH = 22;
  const width = PANEL_W * figure.panels.length;
  const height = PANEL_H + legendH;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  figure.panels.forEach((panel, i) => {
    parts.push(renderPanel(panel, x, y, xLabel ?? "epoch", yLabel ?? figure.metric, i * PANEL_W));
  });
  const seriesNames = figure.panels[0].series.map((s) => s.key);
  seriesNames.forEach((name, i) => {
    const lx = MARGIN.left + i * 130;
    const ly = PANEL_H + 14;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${COLORS[i % COLORS.length]}" stroke-width="2"/>`
    );
    parts.push(`<text x="${lx + 28}" y="${ly + 4}" font-size="11">${name}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}
