#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { buildFigure, parseInputArg, PlotSpec } from "./figure.js";
import { renderSvg } from "./svg.js";

const USAGE = `usage: drivesim-plot --csv <label=value,...:metrics.csv> [--csv ...]
                     --metric NAME --panel KEY --series KEY --out FIG.svg
                     [--smooth N] [--xlabel TEXT] [--ylabel TEXT]

Each --csv argument names one batch metrics file, prefixed with the
grouping attributes that file represents, e.g.
  --csv protocol=drive,reward_change=stepwise:results/drive_step/metrics.csv
Panels are laid out by --panel values and lines by --series values; the
shaded band is the 95% confidence interval across the runs in the file.`;

export function main(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      csv: { type: "string", multiple: true },
      metric: { type: "string" },
      panel: { type: "string" },
      series: { type: "string" },
      out: { type: "string" },
      smooth: { type: "string", default: "1" },
      xlabel: { type: "string" },
      ylabel: { type: "string" },
      help: { type: "boolean", default: false },
    },
  });
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  for (const required of ["csv", "metric", "panel", "series", "out"] as const) {
    if (!values[required] || (Array.isArray(values[required]) && values[required].length === 0)) {
      console.error(`missing --${required}\n\n${USAGE}`);
      return 2;
    }
  }
  const spec: PlotSpec = {
    inputs: (values.csv as string[]).map(parseInputArg),
    metric: values.metric as string,
    panelKey: values.panel as string,
    seriesKey: values.series as string,
    outPath: values.out as string,
    xLabel: values.xlabel,
    yLabel: values.ylabel,
    smoothWindow: Number(values.smooth),
  };
  const svg = renderSvg(buildFigure(spec), spec.xLabel, spec.yLabel);
  writeFileSync(spec.outPath, svg);
  console.log(`wrote ${spec.outPath}`);
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() as string)) {
  process.exit(main(process.argv.slice(2)));
}
