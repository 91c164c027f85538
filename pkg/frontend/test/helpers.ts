import { CSV_COLUMNS } from "../src/schema";

type Raw = Record<string, string | number>;

export function row(over: Raw = {}): Raw {
  return {
    scenario_id: "s0", seed: 0, snr_db: 0, eta: 1, k_min: 1,
    algorithm: "gs-u", se_bits_per_hz: 1, objective_evals: 10,
    infeasible_evals: 0, iterations: 5, fallback_count: 0, wall_ms: 0,
    p_u_w: 0.1, channel_fp: "abc123def456", error: "",
    ...over,
  };
}

export function csvText(rows: Raw[]): string {
  const lines = [CSV_COLUMNS.join(",")];
  for (const r of rows) {
    lines.push(CSV_COLUMNS.map((c) => String(r[c] ?? "")).join(","));
  }
  return lines.join("\n") + "\n";
}
