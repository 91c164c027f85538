import { RunRow } from "./schema";
import { EmptySelection, SchemaError } from "./errors";

export type XVar = "snr_db" | "eta" | "k_min";
export type YVar = "se" | "evals";

export interface FigureSpec {
  x: XVar;
  y: YVar;
  filters: Record<string, string>;
  out: string;
}

export interface SeriesPoint {
  x: number;
  mean: number;
  stderr: number;
  n: number;
}

export interface Series {
  algorithm: string;
  points: SeriesPoint[];
}

const NUMERIC_COLUMNS = new Set(["seed", "snr_db", "eta", "k_min",
  "objective_evals", "infeasible_evals", "iterations", "fallback_count",
  "wall_ms", "p_u_w"]);
const STRING_COLUMNS = new Set(["scenario_id", "algorithm", "channel_fp"]);

export function parseFilters(pairs: string[]): Record<string, string> {
  const filters: Record<string, string> = {};
  for (const pair of pairs) {
    const idx = pair.indexOf("=");
    if (idx <= 0) throw new SchemaError(`bad --filter ${JSON.stringify(pair)}, want key=value`);
    const key = pair.slice(0, idx);
    if (!NUMERIC_COLUMNS.has(key) && !STRING_COLUMNS.has(key)) {
      throw new SchemaError(`unknown filter column ${JSON.stringify(key)}`);
    }
    filters[key] = pair.slice(idx + 1);
  }
  return filters;
}

export function applyFilters(rows: RunRow[], filters: Record<string, string>): RunRow[] {
  let kept = rows;
  for (const [key, value] of Object.entries(filters)) {
    if (NUMERIC_COLUMNS.has(key)) {
      const want = Number(value);
      if (!Number.isFinite(want)) {
        throw new SchemaError(`filter ${key}=${value}: not a number`);
      }
      kept = kept.filter((r) => (r as any)[key] === want);
    } else {
      kept = kept.filter((r) => (r as any)[key] === value);
    }
  }
  return kept;
}

function mean(xs: number[]) {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

function stderr(xs: number[]) {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  const varSum = xs.reduce((a, b) => a + (b - m) * (b - m), 0);
  return Math.sqrt(varSum / (xs.length - 1)) / Math.sqrt(xs.length);
}

/**
 * Mean y per (algorithm, x) over non-error rows, one series per algorithm.
 *
 * Series keep CSV appearance order so figures are stable across runs;
 * x values are sorted ascending within each series.
 */
export function aggregate(rows: RunRow[], x: XVar, y: YVar): Series[] {
  const order: string[] = [];
  const groups = new Map<string, Map<number, number[]>>();
  for (const r of rows) {
    if (r.error !== "") continue;
    const yVal = y === "se" ? r.se_bits_per_hz : r.objective_evals;
    if (yVal === null) continue;
    let byX = groups.get(r.algorithm);
    if (!byX) {
      byX = new Map();
      groups.set(r.algorithm, byX);
      order.push(r.algorithm);
    }
    const xVal = r[x];
    let bucket = byX.get(xVal);
    if (!bucket) {
      bucket = [];
      byX.set(xVal, bucket);
    }
    bucket.push(yVal);
  }
  const series: Series[] = order.map((algorithm) => {
    const byX = groups.get(algorithm)!;
    const xs = [...byX.keys()].sort((a, b) => a - b);
    return {
      algorithm,
      points: xs.map((xv) => {
        const ys = byX.get(xv)!;
        return { x: xv, mean: mean(ys), stderr: stderr(ys), n: ys.length };
      }),
    };
  });
  if (!series.length) {
    throw new EmptySelection("no plottable rows after filtering");
  }
  return series;
}

/**
 * Max relative gap between two algorithms' means at shared x values.
 * Returns null when either series is absent or they share no x.
 */
export function overlapGap(series: Series[], a = "gs-u", b = "es-u"): number | null {
  const sa = series.find((s) => s.algorithm === a);
  const sb = series.find((s) => s.algorithm === b);
  if (!sa || !sb) return null;
  const bByX = new Map(sb.points.map((p) => [p.x, p.mean]));
  let worst: number | null = null;
  for (const p of sa.points) {
    const ref = bByX.get(p.x);
    if (ref === undefined || ref === 0) continue;
    const gap = Math.abs(p.mean - ref) / Math.abs(ref);
    if (worst === null || gap > worst) worst = gap;
  }
  return worst;
}
