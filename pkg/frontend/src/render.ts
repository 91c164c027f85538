import { readFileSync, writeFileSync } from "fs";
import { FigureSpec, Series, aggregate, applyFilters, overlapGap } from "./aggregate";
import { EmptySelection } from "./errors";
import { parseRuns } from "./schema";
import { renderChart } from "./svg";

export interface RenderResult {
  series: Series[];
  nPoints: number;
  overlap: number | null; // max gs-u/es-u relative SE gap, if both present
  svg: string;
}

const X_LABELS: Record<string, string> = {
  snr_db: "SNR [dB]",
  eta: "uplink/downlink power ratio",
  k_min: "minimum scheduled users per direction",
};
const Y_LABELS: Record<string, string> = {
  se: "mean spectral efficiency [bits/s/Hz]",
  evals: "mean objective evaluations",
};

export function render(csvPath: string, spec: FigureSpec): RenderResult {
  const rows = applyFilters(parseRuns(readFileSync(csvPath, "utf8")),
    spec.filters);
  if (!rows.length) {
    throw new EmptySelection(`filters ${JSON.stringify(spec.filters)}`
      + ` match no rows of ${csvPath}`);
  }
  const series = aggregate(rows, spec.x, spec.y);
  // the overlap claim is about SE curves, so skip it for eval figures
  const overlap = spec.y === "se" ? overlapGap(series) : null;
  const singleX = new Set(series.flatMap((s) => s.points.map((p) => p.x))).size === 1;
  const svg = renderChart(series, {
    xLabel: X_LABELS[spec.x],
    yLabel: Y_LABELS[spec.y],
    bar: spec.y === "evals" && singleX,
  });
  writeFileSync(spec.out, svg);
  const nPoints = series.reduce((a, s) => a + s.points.length, 0);
  return { series, nPoints, overlap, svg };
}
