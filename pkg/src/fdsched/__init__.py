"""fdsched: joint antenna-splitting and user-scheduling optimizer for
full-duplex massive MIMO, with exhaustive/greedy/random baselines and a
Monte Carlo sweep harness."""

__version__ = "0.1.0"

from .errors import (FdschedError, Infeasible, SingularChannel,
                     InfeasibleConstraints, LevelCapExceeded,
                     FallbackExhausted, SpaceTooLarge, NoFeasibleMask,
                     ParseError, ValidationError, SchemaError)
from .config import SystemConfig, PathlossParams
from .selection import ProblemSpec, SelectionMask, JOINT, USER_ONLY
from .channel import ChannelRealization, draw_channels
from .evaluate import (EvalCounter, evaluate_selection, active_backend,
                       zf_precoder, zf_detector, downlink_sinr, uplink_sinr,
                       spectral_efficiency)
from .subset import (ConstraintBounds, constraint_violation,
                     double_criterion_rank, mma_step, subset_simulate,
                     generate_joint_masks, generate_user_masks)
from .gibbs import (GibbsHyper, Population, RunTrace, sigmoid_prob, log_prob,
                    grad_log_prob, theta_update, gibbs_pmf, kl_divergence,
                    free_energy, sample_population, optimize)
from .oracles import (exhaustive_search, random_feasible_baseline,
                      greedy_successive_selection)
from .harness import (ScenarioSweep, RunRecord, load_config, run_sweep,
                      summarize, config_reference, read_csv, write_csv)

__all__ = [
    "FdschedError", "Infeasible", "SingularChannel", "InfeasibleConstraints",
    "LevelCapExceeded", "FallbackExhausted", "SpaceTooLarge", "NoFeasibleMask",
    "ParseError", "ValidationError", "SchemaError",
    "SystemConfig", "PathlossParams",
    "ProblemSpec", "SelectionMask", "JOINT", "USER_ONLY",
    "ChannelRealization", "draw_channels",
    "EvalCounter", "evaluate_selection", "active_backend",
    "zf_precoder", "zf_detector", "downlink_sinr", "uplink_sinr",
    "spectral_efficiency",
    "ConstraintBounds", "constraint_violation", "double_criterion_rank",
    "mma_step", "subset_simulate", "generate_joint_masks",
    "generate_user_masks",
    "GibbsHyper", "Population", "RunTrace", "sigmoid_prob", "log_prob",
    "grad_log_prob", "theta_update", "gibbs_pmf", "kl_divergence",
    "free_energy", "sample_population", "optimize",
    "exhaustive_search", "random_feasible_baseline",
    "greedy_successive_selection",
    "ScenarioSweep", "RunRecord", "load_config", "run_sweep", "summarize",
    "config_reference", "read_csv", "write_csv",
    "__version__",
]
