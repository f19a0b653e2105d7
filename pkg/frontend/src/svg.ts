/**
 * Minimal deterministic SVG chart renderer: line series with optional
 * shaded bands, linear or logarithmic axes. Output is a pure function of
 * the input data, so identical inputs produce byte-identical images.
 */

export type AxisScale = "linear" | "log";

export interface BandPoint {
  x: number;
  lo: number;
  hi: number;
}

export interface ChartSeries {
  label: string;
  points: { x: number; y: number }[];
  band?: BandPoint[];
}

export interface ChartConfig {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: AxisScale;
  yScale: AxisScale;
  series: ChartSeries[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 24, bottom: 56, left: 76 };
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

/** Pixel coordinate, rounded to 1/100 px for stable strings. */
export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

/** Tick label: trim float noise, keep integers plain. */
export function fmtTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  return String(Number(v.toPrecision(10)));
}

export function makeScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
  scale: AxisScale,
): (v: number) => number {
  if (scale === "log") {
    if (lo <= 0) {
      throw new Error(`log scale requires positive values, got domain [${lo}, ${hi}]`);
    }
    const logLo = Math.log10(lo);
    const logHi = Math.log10(hi);
    return (v) => pxLo + ((Math.log10(v) - logLo) / (logHi - logLo)) * (pxHi - pxLo);
  }
  return (v) => pxLo + ((v - lo) / (hi - lo)) * (pxHi - pxLo);
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  const rawStep = (hi - lo) / Math.max(1, count - 1);
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const normalized = rawStep / magnitude;
  const factor = normalized < 1.5 ? 1 : normalized < 3.5 ? 2 : normalized < 7.5 ? 5 : 10;
  const step = factor * magnitude;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Decade ticks; falls back to a 1-2-5 progression when decades are sparse. */
export function logTicks(lo: number, hi: number): number[] {
  const all: number[] = [];
  for (let d = Math.floor(Math.log10(lo)); d <= Math.ceil(Math.log10(hi)); d++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, d);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) {
        all.push(v);
      }
    }
  }
  const decades = all.filter((t) => {
    const l = Math.log10(t);
    return Math.abs(l - Math.round(l)) < 1e-9;
  });
  return decades.length >= 3 ? decades : all;
}

function padDomain(lo: number, hi: number, scale: AxisScale): [number, number] {
  if (scale === "log") {
    if (lo <= 0) {
      throw new Error(`log scale requires positive values, got domain [${lo}, ${hi}]`);
    }
    if (lo === hi) {
      return [lo / 2, hi * 2];
    }
    const factor = Math.pow(hi / lo, 0.04);
    return [lo / factor, hi * factor];
  }
  if (lo === hi) {
    return [lo - 1, hi + 1];
  }
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(cfg: ChartConfig): string {
  if (cfg.series.length === 0) {
    throw new Error("chart has no series");
  }
  const xs: number[] = [];
  const ys: number[] = [];
  for (const series of cfg.series) {
    for (const p of series.points) {
      xs.push(p.x);
      ys.push(p.y);
    }
    for (const b of series.band ?? []) {
      xs.push(b.x);
      ys.push(b.lo, b.hi);
    }
  }
  const [xLo, xHi] = padDomain(Math.min(...xs), Math.max(...xs), cfg.xScale);
  const [yLo, yHi] = padDomain(Math.min(...ys), Math.max(...ys), cfg.yScale);

  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const sx = makeScale(xLo, xHi, left, right, cfg.xScale);
  const sy = makeScale(yLo, yHi, bottom, top, cfg.yScale);

  const xTicks = cfg.xScale === "log" ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  const yTicks = cfg.yScale === "log" ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);

  for (const t of xTicks) {
    const px = fmt(sx(t));
    parts.push(
      `<line x1="${px}" y1="${top}" x2="${px}" y2="${bottom}" stroke="#e6e6e6" stroke-width="1"/>`,
    );
  }
  for (const t of yTicks) {
    const py = fmt(sy(t));
    parts.push(
      `<line x1="${left}" y1="${py}" x2="${right}" y2="${py}" stroke="#e6e6e6" stroke-width="1"/>`,
    );
  }

  cfg.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const band = series.band ?? [];
    if (band.length > 0) {
      const upper = band.map((b) => `${fmt(sx(b.x))},${fmt(sy(b.hi))}`);
      const lower = [...band].reverse().map((b) => `${fmt(sx(b.x))},${fmt(sy(b.lo))}`);
      parts.push(
        `<polygon points="${[...upper, ...lower].join(" ")}" fill="${color}" ` +
          `fill-opacity="0.18" stroke="none"/>`,
      );
    }
  });

  cfg.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const pts = series.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    if (series.points.length <= 32) {
      for (const p of series.points) {
        parts.push(
          `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="2.5" fill="${color}"/>`,
        );
      }
    }
  });

  parts.push(
    `<line x1="${left}" y1="${bottom}" x2="${right}" y2="${bottom}" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${left}" y1="${top}" x2="${left}" y2="${bottom}" stroke="#333333" stroke-width="1"/>`,
  );
  for (const t of xTicks) {
    const px = fmt(sx(t));
    parts.push(
      `<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px}" y="${bottom + 18}" font-size="11" fill="#333333" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const py = fmt(sy(t));
    parts.push(
      `<line x1="${left - 5}" y1="${py}" x2="${left}" y2="${py}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${left - 8}" y="${fmt(sy(t) + 4)}" font-size="11" fill="#333333" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }

  parts.push(
    `<text x="${left}" y="22" font-size="14" font-weight="600" fill="#111111">${escapeText(cfg.title)}</text>`,
  );
  parts.push(
    `<text x="${fmt((left + right) / 2)}" y="${HEIGHT - 12}" font-size="12" fill="#333333" text-anchor="middle">${escapeText(cfg.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${fmt(-(top + bottom) / 2)}" y="18" font-size="12" fill="#333333" text-anchor="middle" transform="rotate(-90)">${escapeText(cfg.yLabel)}</text>`,
  );

  cfg.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const y = top + 14 + i * 18;
    parts.push(
      `<line x1="${left + 12}" y1="${y}" x2="${left + 32}" y2="${y}" stroke="${color}" stroke-width="2.5"/>`,
    );
    parts.push(
      `<text x="${left + 38}" y="${y + 4}" font-size="12" fill="#111111">${escapeText(series.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
