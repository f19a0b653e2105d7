/**
 * Figure pipeline: reads harness result CSVs, computes per-checkpoint
 * statistics across repetitions, renders one SVG per figure spec, and
 * writes a stats.csv sidecar holding every mean/SD the figures display.
 *
 * Figure kinds:
 *   regret  - mean pseudo-regret vs round t, shaded by +/- 1 SD across
 *             repetitions (a single repetition yields a zero-width band)
 *   runtime - mean ns/step vs arm count K (parsed from env "synthetic-K{K}")
 *   ratio   - per-K ratio of mean ns/step between policies in one runtime
 *             CSV, each policy relative to the lexicographically first one;
 *             the sidecar carries the underlying per-policy statistics
 */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { readCsv, requireColumns, parseNumber, type CsvTable } from "./csv.js";
import { mean, sd } from "./stats.js";
import { renderChart, type AxisScale, type ChartSeries } from "./svg.js";

export type FigureKind = "regret" | "runtime" | "ratio";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  xscale?: AxisScale;
  yscale?: AxisScale;
}

export interface PointStat {
  x: number;
  mean: number;
  sd: number;
  n: number;
}

export interface SeriesStats {
  input: string;
  policy: string;
  points: PointStat[];
}

const KINDS: FigureKind[] = ["regret", "runtime", "ratio"];
const SCALES: AxisScale[] = ["linear", "log"];

export function loadSpec(specPath: string): FigureSpec[] {
  const parsed: unknown = JSON.parse(readFileSync(specPath, "utf-8"));
  if (!Array.isArray(parsed)) {
    throw new Error(`${specPath}: figure spec must be a JSON array`);
  }
  if (parsed.length === 0) {
    throw new Error(`${specPath}: no figures in spec`);
  }
  return parsed.map((entry, i) => {
    const where = `${specPath}: figure ${i}`;
    if (typeof entry !== "object" || entry === null) {
      throw new Error(`${where}: must be an object`);
    }
    const spec = entry as Record<string, unknown>;
    if (!KINDS.includes(spec.kind as FigureKind)) {
      throw new Error(`${where}: unknown kind "${String(spec.kind)}" (expected regret, runtime, or ratio)`);
    }
    if (
      !Array.isArray(spec.inputs) ||
      spec.inputs.length === 0 ||
      !spec.inputs.every((p) => typeof p === "string")
    ) {
      throw new Error(`${where}: "inputs" must be a non-empty array of paths`);
    }
    if (typeof spec.output !== "string" || spec.output === "") {
      throw new Error(`${where}: "output" must be a path`);
    }
    for (const axis of ["xscale", "yscale"] as const) {
      const value = spec[axis];
      if (value !== undefined && !SCALES.includes(value as AxisScale)) {
        throw new Error(`${where}: ${axis} must be "linear" or "log", got "${String(value)}"`);
      }
    }
    return {
      kind: spec.kind as FigureKind,
      inputs: spec.inputs as string[],
      output: spec.output,
      xscale: spec.xscale as AxisScale | undefined,
      yscale: spec.yscale as AxisScale | undefined,
    };
  });
}

function groupStats(
  table: CsvTable,
  keyOf: (row: string[]) => { policy: string; x: number },
  valueColumn: number,
): SeriesStats[] {
  if (table.rows.length === 0) {
    throw new Error(`${table.path}: empty repetition set (no data rows)`);
  }
  const byPolicy = new Map<string, Map<number, number[]>>();
  for (const row of table.rows) {
    const { policy, x } = keyOf(row);
    let byX = byPolicy.get(policy);
    if (byX === undefined) {
      byX = new Map();
      byPolicy.set(policy, byX);
    }
    let values = byX.get(x);
    if (values === undefined) {
      values = [];
      byX.set(x, values);
    }
    values.push(parseNumber(table, row, valueColumn));
  }
  const series: SeriesStats[] = [];
  for (const policy of [...byPolicy.keys()].sort()) {
    const byX = byPolicy.get(policy)!;
    const points = [...byX.keys()]
      .sort((a, b) => a - b)
      .map((x) => {
        const values = byX.get(x)!;
        return { x, mean: mean(values), sd: sd(values), n: values.length };
      });
    series.push({ input: table.path, policy, points });
  }
  return series;
}

export function regretStats(path: string): SeriesStats[] {
  const table = readCsv(path);
  const col = requireColumns(table, ["policy", "t", "pseudo_regret"]);
  return groupStats(
    table,
    (row) => ({
      policy: row[col.policy!]!,
      x: parseNumber(table, row, col.t!),
    }),
    col.pseudo_regret!,
  );
}

function armCount(table: CsvTable, env: string): number {
  const match = env.match(/-K(\d+)$/);
  if (match === null) {
    throw new Error(`${table.path}: cannot parse arm count from env "${env}"`);
  }
  return Number(match[1]);
}

export function runtimeStats(path: string): SeriesStats[] {
  const table = readCsv(path);
  const col = requireColumns(table, ["policy", "env", "ns_per_step"]);
  return groupStats(
    table,
    (row) => ({
      policy: row[col.policy!]!,
      x: armCount(table, row[col.env!]!),
    }),
    col.ns_per_step!,
  );
}

/** Per-K ratio of each policy's mean ns/step to the first policy's. */
export function ratioSeries(path: string, perPolicy: SeriesStats[]): ChartSeries[] {
  if (perPolicy.length < 2) {
    throw new Error(
      `${path}: ratio figure needs at least two policies, found ${perPolicy.length}`,
    );
  }
  const base = perPolicy[0]!;
  const baseMeans = new Map(base.points.map((p) => [p.x, p.mean]));
  return perPolicy.slice(1).map((other) => {
    const points = other.points
      .filter((p) => baseMeans.has(p.x))
      .map((p) => ({ x: p.x, y: p.mean / baseMeans.get(p.x)! }));
    if (points.length === 0) {
      throw new Error(
        `${path}: no shared arm counts between ${other.policy} and ${base.policy}`,
      );
    }
    return { label: `${other.policy}/${base.policy}`, points };
  });
}

function bandedSeries(stats: SeriesStats[], labelWithInput: boolean): ChartSeries[] {
  return stats.map((s) => {
    const shortInput = s.input.split("/").pop() ?? s.input;
    return {
      label: labelWithInput ? `${s.policy} (${shortInput})` : s.policy,
      points: s.points.map((p) => ({ x: p.x, y: p.mean })),
      band: s.points.map((p) => ({ x: p.x, lo: p.mean - p.sd, hi: p.mean + p.sd })),
    };
  });
}

const AXIS_LABELS: Record<FigureKind, { x: string; y: string }> = {
  regret: { x: "t", y: "pseudo-regret" },
  runtime: { x: "K", y: "ns/step" },
  ratio: { x: "K", y: "per-step time ratio" },
};

export interface BuiltFigure {
  svg: string;
  stats: SeriesStats[];
}

export function buildFigure(spec: FigureSpec): BuiltFigure {
  const stats: SeriesStats[] = [];
  let chartSeries: ChartSeries[] = [];
  if (spec.kind === "regret") {
    for (const input of spec.inputs) {
      stats.push(...regretStats(input));
    }
  } else {
    for (const input of spec.inputs) {
      const perPolicy = runtimeStats(input);
      stats.push(...perPolicy);
      if (spec.kind === "ratio") {
        chartSeries.push(...ratioSeries(input, perPolicy));
      }
    }
  }
  if (spec.kind !== "ratio") {
    const labels = stats.map((s) => s.policy);
    const duplicates = labels.some((l, i) => labels.indexOf(l) !== i);
    chartSeries = bandedSeries(stats, duplicates);
  }

  const stem = (spec.output.split("/").pop() ?? spec.output).replace(/\.[^.]*$/, "");
  const svg = renderChart({
    title: stem,
    xLabel: AXIS_LABELS[spec.kind].x,
    yLabel: AXIS_LABELS[spec.kind].y,
    xScale: spec.xscale ?? "linear",
    yScale: spec.yscale ?? "linear",
    series: chartSeries,
  });
  return { svg, stats };
}

export function statsCsvLines(kind: FigureKind, stats: SeriesStats[]): string[] {
  const lines: string[] = [];
  for (const series of stats) {
    for (const p of series.points) {
      lines.push(
        `${series.input},${kind},${series.policy},${p.x},` +
          `${p.mean.toPrecision(17)},${p.sd.toPrecision(17)},${p.n}`,
      );
    }
  }
  return lines;
}

/**
 * Render every figure in a spec file. The sidecar stats.csv is written next
 * to the first figure's output and covers all figures. Returns the paths
 * written, sidecar last.
 */
export function renderSpecFile(specPath: string): string[] {
  const specs = loadSpec(specPath);
  const sidecarLines = ["input,kind,policy,x,mean,sd,n"];
  const written: string[] = [];
  for (const spec of specs) {
    const { svg, stats } = buildFigure(spec);
    writeFileSync(spec.output, svg);
    written.push(spec.output);
    sidecarLines.push(...statsCsvLines(spec.kind, stats));
  }
  const sidecarPath = join(dirname(specs[0]!.output), "stats.csv");
  writeFileSync(sidecarPath, sidecarLines.join("\n") + "\n");
  written.push(sidecarPath);
  return written;
}
