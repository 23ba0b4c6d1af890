import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { parseCsv, readCsv } from "../src/csv.js";
import { ci95HalfWidth, mean, movingAverage, sampleStd } from "../src/stats.js";
import { buildFigure, parseInputArg, PlotSpec } from "../src/figure.js";
import { renderSvg } from "../src/svg.js";
import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "..", "fixtures");

function fixtureInputs(metricDirs: [string, Record<string, string>][]) {
  return metricDirs.map(([dir, labels]) => ({
    path: join(FIXTURES, dir, "metrics.csv"),
    labels,
  }));
}

const FOUR_BATCHES: [string, Record<string, string>][] = [
  ["drive_identity", { protocol: "drive", reward_change: "identity" }],
  ["drive_stepwise", { protocol: "drive", reward_change: "stepwise" }],
  ["naive_identity", { protocol: "naive", reward_change: "identity" }],
  ["naive_stepwise", { protocol: "naive", reward_change: "stepwise" }],
];

function spec(overrides: Partial<PlotSpec> = {}): PlotSpec {
  return {
    inputs: fixtureInputs(FOUR_BATCHES),
    metric: "coop_rate",
    panelKey: "reward_change",
    seriesKey: "protocol",
    outPath: "unused.svg",
    ...overrides,
  };
}

describe("stats", () => {
  it("computes the sample standard deviation with the n-1 denominator", () => {
    expect(sampleStd([1, 3])).toBeCloseTo(Math.SQRT2, 12);
    expect(sampleStd([4])).toBe(0);
  });

  it("matches the runner's half-width formula", () => {
    // two runs with values 1 and 3: 1.96 * sqrt(2) / sqrt(2) = 1.96
    expect(ci95HalfWidth([1, 3])).toBeCloseTo(1.96, 12);
    expect(ci95HalfWidth([2.5])).toBe(0);
  });

  it("moving average is a no-op at window 1", () => {
    expect(movingAverage([1, 2, 3], 1)).toEqual([1, 2, 3]);
    expect(movingAverage([0, 3, 6], 3)).toEqual([1.5, 3, 4.5]);
  });
});

describe("csv", () => {
  it("parses header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      ["1", "2"],
      ["3", "4"],
    ]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/ragged/);
  });

  it("parses labeled input arguments", () => {
    const input = parseInputArg("protocol=drive,reward_change=identity:some/metrics.csv");
    expect(input.path).toBe("some/metrics.csv");
    expect(input.labels).toEqual({ protocol: "drive", reward_change: "identity" });
  });
});

describe("figure aggregation", () => {
  it("produces two panels with two series each from four batches", () => {
    const figure = buildFigure(spec());
    expect(figure.panels.map((p) => p.key)).toEqual(["identity", "stepwise"]);
    for (const panel of figure.panels) {
      expect(panel.series.map((s) => s.key)).toEqual(["drive", "naive"]);
      for (const s of panel.series) {
        expect(s.epochs).toEqual([0, 1, 2, 3, 4, 5]);
        expect(s.mean).toHaveLength(6);
        expect(s.ci95).toHaveLength(6);
      }
    }
  });

  it("means and CI half-widths agree with summary.csv within 1e-9", () => {
    for (const [dir, labels] of FOUR_BATCHES) {
      const figure = buildFigure(spec({ inputs: fixtureInputs([[dir, labels]]) }));
      const series = figure.panels[0].series[0];
      const summary = readCsv(join(FIXTURES, dir, "summary.csv"));
      const byEpoch = new Map<number, { mean: number; ci: number }>();
      for (const row of summary.rows) {
        if (row[1] === "coop_rate") {
          byEpoch.set(Number(row[0]), { mean: Number(row[2]), ci: Number(row[3]) });
        }
      }
      series.epochs.forEach((epoch, i) => {
        const want = byEpoch.get(epoch)!;
        expect(Math.abs(series.mean[i] - want.mean)).toBeLessThan(1e-9);
        expect(Math.abs(series.ci95[i] - want.ci)).toBeLessThan(1e-9);
      });
    }
  });

  it("a single-run input has a zero-width band", () => {
    const text = [
      "run_id,seed,epoch,metric,value",
      "s0,0,0,m,1.5",
      "s0,0,1,m,2.5",
    ].join("\n");
    const dir = mkdtempSync(join(tmpdir(), "plot-"));
    const path = join(dir, "metrics.csv");
    writeFileSync(path, text);
    const figure = buildFigure(
      spec({ inputs: [{ path, labels: { protocol: "x", reward_change: "y" } }], metric: "m" })
    );
    expect(figure.panels[0].series[0].ci95).toEqual([0, 0]);
  });

  it("rejects unknown metrics and missing labels", () => {
    expect(() => buildFigure(spec({ metric: "nope" }))).toThrow(/metric 'nope'/);
    expect(() =>
      buildFigure(
        spec({ inputs: [{ path: join(FIXTURES, "drive_identity", "metrics.csv"), labels: {} }] })
      )
    ).toThrow(/no 'reward_change' label/);
    expect(() => buildFigure(spec({ inputs: [] }))).toThrow(/no input/);
  });
});

describe("svg rendering", () => {
  it("renders a two-panel, two-series figure deterministically", () => {
    const figure = buildFigure(spec());
    const svg = renderSvg(figure);
    expect(svg).toContain("<svg");
    expect((svg.match(/class="panel"/g) ?? []).length).toBe(2);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(4); // 2 panels x 2 series
    expect((svg.match(/<polygon/g) ?? []).length).toBe(4); // CI bands
    expect(svg).toContain(">identity<");
    expect(svg).toContain(">stepwise<");
    expect(svg).toContain(">drive<");
    expect(svg).toContain(">naive<");
    expect(renderSvg(buildFigure(spec()))).toBe(svg);
  });
});

describe("cli", () => {
  it("writes a figure end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "plot-cli-"));
    const out = join(dir, "fig.svg");
    const argv = [
      ...FOUR_BATCHES.map(
        ([d, labels]) =>
          `--csv=protocol=${labels.protocol},reward_change=${labels.reward_change}:${join(
            FIXTURES,
            d,
            "metrics.csv"
          )}`
      ),
      "--metric=coop_rate",
      "--panel=reward_change",
      "--series=protocol",
      `--out=${out}`,
    ];
    expect(main(argv)).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("</svg>");
  });

  it("reports missing arguments", () => {
    expect(main(["--metric=coop_rate"])).toBe(2);
  });
});
