"""Monte Carlo experiment harness.

Reads flat key=value config files, sweeps (SNR, eta, K_min) scenario points
over seeded channel realizations, dispatches the optimizer and the oracle
baselines on identical channels, and persists one CSV row per
(scenario, realization, algorithm) cell.

Seed discipline: the channel stream of a cell is SeedSequence((master,
scenario_idx, realization_idx)) and is shared by every algorithm in the
cell; each algorithm's private stream appends 16 + its registry index.
"""

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import draw_channels
from .config import PathlossParams, SystemConfig
from .errors import FdschedError, ParseError, SchemaError, ValidationError
from .evaluate import EvalCounter
from .gibbs import GibbsHyper, optimize
from .oracles import (exhaustive_search, greedy_successive_selection,
                      random_feasible_baseline)
from .selection import ProblemSpec

ALGORITHMS = ("gs-j", "gs-u", "es-j", "es-u", "greedy", "random")

CSV_COLUMNS = [
    "scenario_id", "seed", "snr_db", "eta", "k_min", "algorithm",
    "se_bits_per_hz", "objective_evals", "infeasible_evals", "iterations",
    "fallback_count", "wall_ms", "p_u_w", "channel_fp", "error",
]


def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes"):
        return True
    if s.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_float_list(s: str) -> list:
    return [float(v) for v in s.split(",") if v.strip() != ""]


def _parse_int_list(s: str) -> list:
    return [int(v) for v in s.split(",") if v.strip() != ""]


def _parse_str_list(s: str) -> list:
    return [v.strip() for v in s.split(",") if v.strip() != ""]


def _parse_opt_float(s: str):
    return None if s.strip().lower() in ("", "none", "auto") else float(s)


# name -> (parser, default, description); the single source of truth behind
# load_config and the config-reference CLI output
CONFIG_SCHEMA = {
    # cell geometry and population
    "m": (int, 6, "BS antennas"),
    "k_u": (int, 3, "uplink-requesting users"),
    "k_d": (int, 3, "downlink-requesting users"),
    "cell_radius_m": (float, 40.0, "cell radius in meters"),
    "min_dist_m": (float, 10.0, "minimum BS-user distance in meters"),
    "carrier_ghz": (float, 2.0,
                    "carrier frequency; informational, the pathloss "
                    "constants already assume it"),
    # fading / noise / self-interference statistics
    "shadow_std_los_db": (float, 3.0, "LOS shadowing std dev (dB)"),
    "shadow_std_nlos_db": (float, 4.0, "NLOS shadowing std dev (dB)"),
    "shadow_std_u2u_db": (float, 6.0, "user-to-user shadowing std dev (dB)"),
    "kappa": (float, 1.0, "Rician factor of the SI channel"),
    "sigma2_si_db": (float, -100.0, "residual SI power (dB)"),
    "sigma2_bs_w": (float, 1.0e-13, "AWGN variance at the BS (W)"),
    "sigma2_dl_w": (float, 1.0e-13, "AWGN variance per DL user (W)"),
    "cond_cap": (float, 1.0e10, "condition-number cap for ZF Gram matrices"),
    "snr_ref_dist_m": (_parse_opt_float, None,
                       "SNR reference distance in meters; 'auto' = cell radius"),
    # pathloss laws PL(d_km) = a + b log10(d_km), in dB
    "pathloss_los_a": (float, 103.8, "BS-user LOS pathloss intercept"),
    "pathloss_los_b": (float, 20.9, "BS-user LOS pathloss slope"),
    "pathloss_nlos_a": (float, 145.4, "BS-user NLOS pathloss intercept"),
    "pathloss_nlos_b": (float, 37.5, "BS-user NLOS pathloss slope"),
    "pathloss_u2u_a": (float, 98.45, "user-to-user pathloss intercept"),
    "pathloss_u2u_b": (float, 20.0, "user-to-user pathloss slope"),
    "los_prob_d1_m": (float, 156.0, "LOS-probability length scale d1 (m)"),
    "los_prob_d2_m": (float, 30.0, "LOS-probability length scale d2 (m)"),
    # sweep axes and Monte Carlo controls
    "snr_db_list": (_parse_float_list, [0.0], "SNR grid in dB"),
    "eta_list": (_parse_float_list, [1.0], "power-ratio grid, eta = p_d/p_u"),
    "k_min_list": (_parse_int_list, [1], "per-direction minimum-user grid"),
    "realizations": (int, 50, "channel realizations per scenario point"),
    "algorithms": (_parse_str_list, ["gs-j", "gs-u", "es-j", "es-u"],
                   "algorithms to run: " + ", ".join(ALGORITHMS)),
    "master_seed": (int, 0, "root seed of the whole sweep"),
    "m_r": (_parse_opt_float, None,
            "receive antennas of the fixed split (user-only algorithms); "
            "'auto' = m // 3"),
    "random_draws": (int, 100, "feasible draws of the random baseline"),
    # optimizer hyperparameters
    "alpha": (float, 0.5, "theta learning rate"),
    "beta": (_parse_opt_float, None,
             "Bernoulli sharpness; 'auto' = 0.2 up to 10 dB else 0.1"),
    "temperature": (float, 0.0, "free-energy temperature T"),
    "population_size": (int, 100, "samples per optimizer iteration"),
    "stop_window": (int, 100, "consecutive near-equal bests that stop a run"),
    "stop_tol": (float, 1e-6, "stop-window equality tolerance"),
    "max_iterations": (int, 5000, "hard iteration cap per optimizer run"),
    "fallback_retry_cap": (int, 5, "sampling retries before giving up"),
}

_SYSTEM_KEYS = {
    "m", "k_u", "k_d", "cell_radius_m", "min_dist_m", "carrier_ghz",
    "shadow_std_los_db", "shadow_std_nlos_db", "shadow_std_u2u_db", "kappa",
    "sigma2_bs_w", "sigma2_dl_w", "cond_cap", "snr_ref_dist_m",
}


@dataclass
class ScenarioSweep:
    """Everything run_sweep needs: base physics plus the scenario grid."""

    base_config: SystemConfig
    snr_db_list: list
    eta_list: list
    k_min_list: list
    realizations: int
    algorithms: list
    master_seed: int
    m_r: int
    random_draws: int
    hyper: dict = field(default_factory=dict)  # GibbsHyper kwargs; beta None = auto

    def points(self):
        """Scenario points in sweep order: SNR outer, then eta, then k_min."""
        out = []
        for snr in self.snr_db_list:
            for eta in self.eta_list:
                for k_min in self.k_min_list:
                    out.append((snr, eta, k_min))
        return out

    def point_config(self, snr_db, eta, k_min) -> SystemConfig:
        return self.base_config.with_snr_eta(snr_db, eta, k_min=k_min)


def _read_kv_file(path) -> dict:
    values = {}
    try:
        fh = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"{path}: no such config file") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value, "
                                 f"got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in CONFIG_SCHEMA:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
            parser = CONFIG_SCHEMA[key][0]
            try:
                values[key] = parser(val)
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: bad value for "
                                 f"{key!r}: {e}") from None
    return values


def load_config(path):
    """Parse a key=value config file into (ScenarioSweep, SystemConfig).

    Every key has a documented default (see CONFIG_SCHEMA); unknown keys,
    duplicates and malformed lines raise ParseError with the offending line,
    violated invariants raise ValidationError.
    """
    raw = _read_kv_file(path)
    v = {key: raw.get(key, default) for key, (_, default, _) in
         CONFIG_SCHEMA.items()}

    pathloss = PathlossParams(
        los_a=v["pathloss_los_a"], los_b=v["pathloss_los_b"],
        nlos_a=v["pathloss_nlos_a"], nlos_b=v["pathloss_nlos_b"],
        u2u_a=v["pathloss_u2u_a"], u2u_b=v["pathloss_u2u_b"],
        los_prob_d1_m=v["los_prob_d1_m"], los_prob_d2_m=v["los_prob_d2_m"])
    base = SystemConfig(
        m=v["m"], k_u=v["k_u"], k_d=v["k_d"],
        sigma2_bs_w=v["sigma2_bs_w"], sigma2_dl_w=v["sigma2_dl_w"],
        kappa=v["kappa"], sigma2_si_w=10.0 ** (v["sigma2_si_db"] / 10.0),
        cell_radius_m=v["cell_radius_m"], min_dist_m=v["min_dist_m"],
        carrier_ghz=v["carrier_ghz"],
        shadow_std_los_db=v["shadow_std_los_db"],
        shadow_std_nlos_db=v["shadow_std_nlos_db"],
        shadow_std_u2u_db=v["shadow_std_u2u_db"],
        pathloss=pathloss, cond_cap=v["cond_cap"],
        snr_ref_dist_m=v["snr_ref_dist_m"])

    for name in ("snr_db_list", "eta_list", "k_min_list", "algorithms"):
        if not v[name]:
            raise ValidationError(f"{name} must be non-empty")
    for k_min in v["k_min_list"]:
        if not 0 <= k_min <= min(base.k_u, base.k_d):
            raise ValidationError(
                f"k_min={k_min} outside 0..min(k_u, k_d)="
                f"{min(base.k_u, base.k_d)}")
    for eta in v["eta_list"]:
        if eta <= 0:
            raise ValidationError(f"eta must be > 0, got {eta}")
    for algo in v["algorithms"]:
        if algo not in ALGORITHMS:
            raise ValidationError(
                f"unknown algorithm {algo!r}; choose from "
                + ", ".join(ALGORITHMS))
    if v["realizations"] < 1:
        raise ValidationError("realizations must be >= 1")
    if v["random_draws"] < 1:
        raise ValidationError("random_draws must be >= 1")
    if v["master_seed"] < 0:
        raise ValidationError("master_seed must be >= 0")

    m_r = v["m_r"]
    if m_r is None:
        m_r = base.m // 3
    else:
        m_r = int(m_r)
    if not 1 <= m_r <= base.m - 1:
        raise ValidationError(f"m_r={m_r} outside 1..{base.m - 1}")

    hyper = dict(alpha=v["alpha"], beta=v["beta"],
                 temperature=v["temperature"],
                 population_size=v["population_size"],
                 stop_window=v["stop_window"], stop_tol=v["stop_tol"],
                 max_iterations=v["max_iterations"],
                 fallback_retry_cap=v["fallback_retry_cap"])
    # surface bad hyperparameters at load time, not mid-sweep
    _hyper_for(hyper, snr_db=0.0)

    sweep = ScenarioSweep(
        base_config=base, snr_db_list=v["snr_db_list"],
        eta_list=v["eta_list"], k_min_list=v["k_min_list"],
        realizations=v["realizations"], algorithms=v["algorithms"],
        master_seed=v["master_seed"], m_r=m_r,
        random_draws=v["random_draws"], hyper=hyper)
    return sweep, base


def config_reference() -> str:
    """Human-readable table of every config key, its default and meaning."""
    lines = ["# key = default  (description)"]
    for key, (_, default, doc) in CONFIG_SCHEMA.items():
        if isinstance(default, list):
            shown = ",".join(str(x) for x in default)
        elif default is None:
            shown = "auto"
        else:
            shown = str(default)
        lines.append(f"{key} = {shown}  ({doc})")
    return "\n".join(lines)


@dataclass
class RunRecord:
    """One CSV row: an algorithm's outcome on one seeded scenario cell."""

    scenario_id: str
    seed: int
    snr_db: float
    eta: float
    k_min: int
    algorithm: str
    se_bits_per_hz: float | None
    objective_evals: int
    infeasible_evals: int
    iterations: int
    fallback_count: int
    wall_ms: float
    p_u_w: float
    channel_fp: str
    error: str = ""

    def to_row(self) -> list:
        se = "" if self.se_bits_per_hz is None else repr(self.se_bits_per_hz)
        return [
            self.scenario_id, str(self.seed), repr(float(self.snr_db)),
            repr(float(self.eta)), str(self.k_min), self.algorithm, se,
            str(self.objective_evals), str(self.infeasible_evals),
            str(self.iterations), str(self.fallback_count),
            f"{self.wall_ms:.3f}" if self.wall_ms else "0",
            repr(float(self.p_u_w)), self.channel_fp, self.error,
        ]


def _hyper_for(hyper_kwargs: dict, snr_db: float) -> GibbsHyper:
    kw = dict(hyper_kwargs)
    beta = kw.pop("beta", None)
    if beta is None:
        return GibbsHyper.for_snr(snr_db, **kw)
    return GibbsHyper(beta=beta, **kw)


def _run_algorithm(algo: str, cfg: SystemConfig, ch, sweep: ScenarioSweep,
                   rng: np.random.Generator, snr_db: float):
    """Returns (se, objective_evals, infeasible_evals, iterations, fallbacks)."""
    counter = EvalCounter()
    if algo in ("gs-j", "gs-u"):
        if algo == "gs-j":
            problem = ProblemSpec.joint(cfg)
        else:
            problem = ProblemSpec.user_only(cfg, sweep.m_r)
        hyper = _hyper_for(sweep.hyper, snr_db)
        _, se, trace = optimize(problem, ch, cfg, hyper, rng)
        c = trace.counter
        return (se, c.feasible, c.infeasible + c.singular, trace.iterations,
                trace.fallback_count)
    if algo in ("es-j", "es-u"):
        if algo == "es-j":
            problem = ProblemSpec.joint(cfg)
        else:
            problem = ProblemSpec.user_only(cfg, sweep.m_r)
        _, se, _ = exhaustive_search(problem, ch, cfg, counter)
        return se, counter.feasible, counter.infeasible + counter.singular, 0, 0
    if algo == "greedy":
        problem = ProblemSpec.user_only(cfg, sweep.m_r)
        mask, se = greedy_successive_selection(problem, ch, cfg, counter)
        return (se, counter.feasible, counter.infeasible + counter.singular,
                int(mask.bits.sum()), 0)
    if algo == "random":
        problem = ProblemSpec.joint(cfg)
        _, se = random_feasible_baseline(problem, ch, cfg, rng,
                                         sweep.random_draws, counter)
        return (se, counter.feasible, counter.infeasible + counter.singular,
                sweep.random_draws, 0)
    raise ValidationError(f"unknown algorithm {algo!r}")


def run_sweep(sweep: ScenarioSweep, out_path, timing: bool = False):
    """Execute the full sweep and write the CSV; returns the records.

    All algorithms of a cell consume the identical ChannelRealization.
    A cell failure (infeasible constraints, exhausted fallbacks, oversized
    search space) becomes an error row; the sweep continues.  With timing
    off (the default) wall_ms is written as 0 so identical configs and
    master seeds produce byte-identical files.
    """
    records: list[RunRecord] = []
    for s_idx, (snr, eta, k_min) in enumerate(sweep.points()):
        cfg = sweep.point_config(snr, eta, k_min)
        scenario_id = f"snr{snr:g}_eta{eta:g}_kmin{k_min}"
        for r_idx in range(sweep.realizations):
            ch_rng = np.random.default_rng(
                np.random.SeedSequence((sweep.master_seed, s_idx, r_idx)))
            ch = draw_channels(cfg, ch_rng)
            fp = ch.fingerprint()
            for algo in sweep.algorithms:
                a_idx = ALGORITHMS.index(algo)
                a_rng = np.random.default_rng(np.random.SeedSequence(
                    (sweep.master_seed, s_idx, r_idx, 16 + a_idx)))
                t0 = time.perf_counter()
                try:
                    se, n_obj, n_inf, n_iter, n_fb = _run_algorithm(
                        algo, cfg, ch, sweep, a_rng, snr)
                    err = ""
                except FdschedError as e:
                    se, n_obj, n_inf, n_iter, n_fb = None, 0, 0, 0, 0
                    err = f"{type(e).__name__}: {e}"
                wall = (time.perf_counter() - t0) * 1e3 if timing else 0.0
                records.append(RunRecord(
                    scenario_id=scenario_id, seed=r_idx, snr_db=snr, eta=eta,
                    k_min=k_min, algorithm=algo, se_bits_per_hz=se,
                    objective_evals=n_obj, infeasible_evals=n_inf,
                    iterations=n_iter, fallback_count=n_fb, wall_ms=wall,
                    p_u_w=cfg.p_u_w, channel_fp=fp, error=err))
    write_csv(records, out_path)
    return records


def write_csv(records, out_path):
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.to_row())


def read_csv(csv_path) -> list:
    """Rows as dicts with typed numeric fields; SchemaError on mismatch."""
    try:
        fh = open(csv_path, encoding="utf-8", newline="")
    except FileNotFoundError:
        raise SchemaError(f"{csv_path}: no such file") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{csv_path}: empty file") from None
        if header != CSV_COLUMNS:
            raise SchemaError(
                f"{csv_path}: header mismatch; expected {CSV_COLUMNS}, "
                f"got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise SchemaError(f"{csv_path}:{lineno}: expected "
                                  f"{len(CSV_COLUMNS)} fields, got {len(row)}")
            d = dict(zip(CSV_COLUMNS, row))
            try:
                d["snr_db"] = float(d["snr_db"])
                d["eta"] = float(d["eta"])
                d["k_min"] = int(d["k_min"])
                d["se_bits_per_hz"] = (float(d["se_bits_per_hz"])
                                       if d["se_bits_per_hz"] != "" else None)
                for key in ("seed", "objective_evals", "infeasible_evals",
                            "iterations", "fallback_count"):
                    d[key] = int(d[key])
                d["wall_ms"] = float(d["wall_ms"])
                d["p_u_w"] = float(d["p_u_w"])
            except ValueError as e:
                raise SchemaError(f"{csv_path}:{lineno}: {e}") from None
            rows.append(d)
    return rows


def summarize(csv_path) -> dict:
    """Aggregate a sweep CSV per (scenario point, algorithm).

    Returns {"points": [...], "ratios": [...]} where each point entry has
    mean/stderr SE over non-error rows plus mean counter values, and each
    ratio entry compares mean objective evaluations of a gs/es pair on the
    same point.
    """
    rows = read_csv(csv_path)
    groups: dict = {}
    order = []
    for d in rows:
        key = (d["snr_db"], d["eta"], d["k_min"], d["algorithm"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(d)

    points = []
    for key in order:
        snr, eta, k_min, algo = key
        rs = groups[key]
        ok = [d for d in rs if d["error"] == "" and d["se_bits_per_hz"] is not None]
        ses = np.array([d["se_bits_per_hz"] for d in ok], dtype=float)
        entry = {
            "snr_db": snr, "eta": eta, "k_min": k_min, "algorithm": algo,
            "n": len(rs), "n_error": len(rs) - len(ok),
            "mean_se": float(ses.mean()) if len(ses) else None,
            "stderr_se": (float(ses.std(ddof=1) / np.sqrt(len(ses)))
                          if len(ses) > 1 else 0.0),
            "mean_objective_evals": (float(np.mean(
                [d["objective_evals"] for d in ok])) if ok else None),
            "mean_infeasible_evals": (float(np.mean(
                [d["infeasible_evals"] for d in ok])) if ok else None),
            "mean_iterations": (float(np.mean(
                [d["iterations"] for d in ok])) if ok else None),
            "mean_wall_ms": (float(np.mean(
                [d["wall_ms"] for d in ok])) if ok else None),
        }
        points.append(entry)

    by_point: dict = {}
    for e in points:
        by_point.setdefault((e["snr_db"], e["eta"], e["k_min"]), {})[
            e["algorithm"]] = e
    ratios = []
    for (snr, eta, k_min), algos in by_point.items():
        for gs, es in (("gs-u", "es-u"), ("gs-j", "es-j")):
            if gs in algos and es in algos:
                g = algos[gs]["mean_objective_evals"]
                x = algos[es]["mean_objective_evals"]
                if g is not None and x:
                    ratios.append({
                        "snr_db": snr, "eta": eta, "k_min": k_min,
                        "pair": f"{gs}/{es}", "eval_ratio": g / x})
    return {"points": points, "ratios": ratios}


def format_summary(summary: dict) -> str:
    """Fixed-width text table of a summarize() result."""
    out = io.StringIO()
    hdr = (f"{'snr_db':>7} {'eta':>6} {'k_min':>5} {'algorithm':>9} "
           f"{'n':>5} {'err':>4} {'mean_se':>10} {'stderr':>8} "
           f"{'evals':>10} {'iters':>8}")
    print(hdr, file=out)
    print("-" * len(hdr), file=out)
    for e in summary["points"]:
        mean_se = "-" if e["mean_se"] is None else f"{e['mean_se']:.4f}"
        stderr = f"{e['stderr_se']:.4f}" if e["mean_se"] is not None else "-"
        evals = ("-" if e["mean_objective_evals"] is None
                 else f"{e['mean_objective_evals']:.1f}")
        iters = ("-" if e["mean_iterations"] is None
                 else f"{e['mean_iterations']:.1f}")
        print(f"{e['snr_db']:>7g} {e['eta']:>6g} {e['k_min']:>5} "
              f"{e['algorithm']:>9} {e['n']:>5} {e['n_error']:>4} "
              f"{mean_se:>10} {stderr:>8} {evals:>10} {iters:>8}", file=out)
    if summary["ratios"]:
        print(file=out)
        print("eval-count ratios:", file=out)
        for r in summary["ratios"]:
            print(f"  snr={r['snr_db']:g} eta={r['eta']:g} "
                  f"k_min={r['k_min']} {r['pair']}: "
                  f"{r['eval_ratio']:.3f}", file=out)
    return out.getvalue()
