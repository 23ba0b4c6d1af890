import { readCsv, requireColumns } from "./csv.js";
import { ci95HalfWidth, mean, movingAverage } from "./stats.js";

/** One metrics.csv file plus the grouping attributes it represents. */
export interface LabeledInput {
  path: string;
  labels: Record<string, string>;
}

export interface PlotSpec {
  inputs: LabeledInput[];
  metric: string;
  panelKey: string;
  seriesKey: string;
  outPath: string;
  xLabel?: string;
  yLabel?: string;
  smoothWindow?: number;
}

export interface SeriesData {
  key: string;
  epochs: number[];
  mean: number[];
  ci95: number[];
}

export interface PanelData {
  key: string;
  series: SeriesData[];
}

export interface FigureData {
  metric: string;
  panelKey: string;
  seriesKey: string;
  panels: PanelData[];
}

/**
 * Parse one `--csv` argument: `key=value,key=value:path/to/metrics.csv`.
 * Labels carry the grouping attributes that are not columns of the CSV
 * itself (a batch file holds exactly one protocol / schedule combination).
 */
export function parseInputArg(arg: string): LabeledInput {
  const sep = arg.lastIndexOf(":");
  if (sep < 0) {
    return { path: arg, labels: {} };
  }
  const labels: Record<string, string> = {};
  for (const pair of arg.slice(0, sep).split(",")) {
    const eq = pair.indexOf("=");
    if (eq < 0) {
      throw new Error(`bad label '${pair}' in --csv argument (expected key=value)`);
    }
    labels[pair.slice(0, eq)] = pair.slice(eq + 1);
  }
  return { path: arg.slice(sep + 1), labels };
}

function label(input: LabeledInput, key: string): string {
  const value = input.labels[key];
  if (value === undefined) {
    throw new Error(`input ${input.path} has no '${key}' label`);
  }
  return value;
}

/** Aggregate per-epoch run values into means with 95% CI half-widths. */
export function buildFigure(spec: PlotSpec): FigureData {
  if (spec.inputs.length === 0) {
    throw new Error("no input CSV files");
  }
  // (panel, series, epoch) -> one value per run
  const groups = new Map<string, Map<string, Map<number, number[]>>>();
  let sawMetric = false;
  for (const input of spec.inputs) {
    const table = readCsv(input.path);
    requireColumns(table, ["run_id", "epoch", "metric", "value"], input.path);
    const iEpoch = table.header.indexOf("epoch");
    const iMetric = table.header.indexOf("metric");
    const iValue = table.header.indexOf("value");
    const panel = label(input, spec.panelKey);
    const series = label(input, spec.seriesKey);
    const panelMap = groups.get(panel) ?? new Map();
    groups.set(panel, panelMap);
    const seriesMap = panelMap.get(series) ?? new Map();
    panelMap.set(series, seriesMap);
    for (const row of table.rows) {
      if (row[iMetric] !== spec.metric) {
        continue;
      }
      sawMetric = true;
      const epoch = Number(row[iEpoch]);
      const value = Number(row[iValue]);
      if (!Number.isFinite(value)) {
        continue; // not-applicable metric values are skipped
      }
      const values = seriesMap.get(epoch) ?? [];
      values.push(value);
      seriesMap.set(epoch, values);
    }
  }
  if (!sawMetric) {
    throw new Error(`metric '${spec.metric}' not present in any input`);
  }
  const window = spec.smoothWindow ?? 1;
  const panels: PanelData[] = [...groups.keys()].sort().map((panelName) => ({
    key: panelName,
    series: [...groups.get(panelName)!.keys()].sort().map((seriesName) => {
      const byEpoch = groups.get(panelName)!.get(seriesName)!;
      const epochs = [...byEpoch.keys()].sort((a, b) => a - b);
      const means = epochs.map((e) => mean(byEpoch.get(e)!));
      const halves = epochs.map((e) => ci95HalfWidth(byEpoch.get(e)!));
      return {
        key: seriesName,
        epochs,
        mean: movingAverage(means, window),
        ci95: movingAverage(halves, window),
      };
    }),
  }));
  return { metric: spec.metric, panelKey: spec.panelKey, seriesKey: spec.seriesKey, panels };
}
