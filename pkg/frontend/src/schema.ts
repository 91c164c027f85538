/**
 * Typed view of the sweep harness CSV.
 *
 * The header is a fixed contract: column order and names must match
 * exactly, otherwise the file is not ours and we refuse to guess.
 */

import { parse } from "papaparse";
import { SchemaError } from "./errors";

export const CSV_COLUMNS = [
  "scenario_id", "seed", "snr_db", "eta", "k_min", "algorithm",
  "se_bits_per_hz", "objective_evals", "infeasible_evals", "iterations",
  "fallback_count", "wall_ms", "p_u_w", "channel_fp", "error",
] as const;

export interface RunRow {
  scenario_id: string;
  seed: number;
  snr_db: number;
  eta: number;
  k_min: number;
  algorithm: string;
  se_bits_per_hz: number | null; // null on error rows
  objective_evals: number;
  infeasible_evals: number;
  iterations: number;
  fallback_count: number;
  wall_ms: number;
  p_u_w: number;
  channel_fp: string;
  error: string;
}

const INT_FIELDS = ["seed", "k_min", "objective_evals", "infeasible_evals",
  "iterations", "fallback_count"] as const;
const FLOAT_FIELDS = ["snr_db", "eta", "wall_ms", "p_u_w"] as const;

export function parseRuns(text: string): RunRow[] {
  const parsed = parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length) {
    const e = parsed.errors[0];
    throw new SchemaError(`CSV parse failed at row ${e.row}: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  if (fields.length !== CSV_COLUMNS.length
      || CSV_COLUMNS.some((c, i) => fields[i] !== c)) {
    throw new SchemaError(
      `header mismatch: expected [${CSV_COLUMNS.join(",")}], `
      + `got [${fields.join(",")}]`);
  }
  return parsed.data.map((raw, i) => {
    const row = {
      scenario_id: raw.scenario_id,
      algorithm: raw.algorithm,
      channel_fp: raw.channel_fp,
      error: raw.error ?? "",
    } as RunRow;
    for (const f of INT_FIELDS) {
      const v = raw[f] === "" ? NaN : Number(raw[f]);
      if (!Number.isInteger(v)) {
        throw new SchemaError(`row ${i + 2}: ${f}=${JSON.stringify(raw[f])}`
          + " is not an integer");
      }
      row[f] = v;
    }
    for (const f of FLOAT_FIELDS) {
      const v = raw[f] === "" ? NaN : Number(raw[f]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`row ${i + 2}: ${f}=${JSON.stringify(raw[f])}`
          + " is not a number");
      }
      row[f] = v;
    }
    if (raw.se_bits_per_hz === "") {
      row.se_bits_per_hz = null;
    } else {
      const se = Number(raw.se_bits_per_hz);
      if (!Number.isFinite(se)) {
        throw new SchemaError(`row ${i + 2}: bad se_bits_per_hz `
          + JSON.stringify(raw.se_bits_per_hz));
      }
      row.se_bits_per_hz = se;
    }
    return row;
  });
}
