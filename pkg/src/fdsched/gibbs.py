"""Gibbs-distribution statistical combinatorial optimizer.

Binary selections are modeled as independent Bernoulli bits with
p_i = (1 + tanh(beta * theta_i))/2; each iteration samples a population,
scores the feasible members, and nudges theta toward the best one with a
stochastic free-energy gradient step.  When the constraints make direct
sampling hopeless the population is regenerated by subset simulation.

Also carries the small enumerable-domain utilities (Gibbs pmf, KL
divergence, free energy) used to sanity-check the theory the update rule
rests on.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .config import SystemConfig
from .errors import (FallbackExhausted, InfeasibleConstraints,
                     LevelCapExceeded, NoFeasibleMask, SingularChannel,
                     ValidationError)
from .evaluate import EvalCounter, evaluate_selection
from .selection import JOINT, ProblemSpec, SelectionMask
from .subset import generate_joint_masks, generate_user_masks


def _bits_of(x) -> np.ndarray:
    return np.asarray(getattr(x, "bits", x), dtype=float)


def sigmoid_prob(theta, beta: float) -> np.ndarray:
    """Per-bit probabilities p_i = (1 + tanh(beta * theta_i))/2."""
    if beta <= 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    return 0.5 * (1.0 + np.tanh(beta * np.asarray(theta, dtype=float)))


def log_prob(x, p) -> float:
    """ln p(x) = sum_i ln(x_i p_i + (1-x_i)(1-p_i)), evaluated in log domain."""
    bits = _bits_of(x)
    p = np.asarray(p, dtype=float)
    return float(np.sum(np.log(np.where(bits == 1, p, 1.0 - p))))


def grad_log_prob(x, p, beta: float) -> np.ndarray:
    """d ln p(x) / d theta_i = 2 beta (x_i - p_i)."""
    return 2.0 * beta * (_bits_of(x) - np.asarray(p, dtype=float))


def gibbs_pmf(f, temperature: float) -> np.ndarray:
    """p*(x) = exp(-f(x)/T) normalized over an explicit enumerated domain."""
    f = np.asarray(f, dtype=float)
    e = np.exp((f.min() - f) / temperature)
    return e / e.sum()


def kl_divergence(p, q) -> float:
    """D(p || q) with the 0 ln 0 = 0 convention."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        raise ValueError("q vanishes on the support of p")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def free_energy(p, f, temperature: float) -> float:
    """F(p) = E_p[f] + T * sum p ln p (the Gibbs pmf minimizes this)."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    mask = p > 0
    entropy_term = float(np.sum(p[mask] * np.log(p[mask])))
    return float(np.sum(p * f)) + temperature * entropy_term


@dataclass(frozen=True)
class GibbsHyper:
    """Optimizer hyperparameters; defaults follow the update-rule constants
    alpha=0.5 and beta=0.2 (low-SNR regime) with a temperature-free update."""

    alpha: float = 0.5
    beta: float = 0.2
    temperature: float = 0.0
    population_size: int = 100
    stop_window: int = 100
    stop_tol: float = 1e-6
    max_iterations: int = 5000
    fallback: str = "subset"  # "subset" | "none"
    fallback_retry_cap: int = 5

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValidationError("alpha and beta must be positive")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if self.population_size < 1:
            raise ValidationError("population_size must be >= 1")
        if self.stop_window < 2:
            raise ValidationError("stop_window must be >= 2")
        if self.stop_tol <= 0:
            raise ValidationError("stop_tol must be > 0")
        if self.fallback not in ("subset", "none"):
            raise ValidationError(f"unknown fallback mode {self.fallback!r}")

    @classmethod
    def for_snr(cls, snr_db: float, **overrides) -> "GibbsHyper":
        """beta = 0.2 up to 10 dB, 0.1 above, unless overridden."""
        overrides.setdefault("beta", 0.2 if snr_db <= 10.0 else 0.1)
        return cls(**overrides)


def theta_update(theta, x, f_x: float, p, hyper: GibbsHyper) -> np.ndarray:
    """One gradient step: theta - 2 alpha beta (f(x) + T(1 + ln p(x)))(x - p).

    Callers maximizing SE pass f_x = -SE.  Pure function.
    """
    theta = np.asarray(theta, dtype=float)
    bits = _bits_of(x)
    p = np.asarray(p, dtype=float)
    coef = f_x
    if hyper.temperature != 0.0:
        coef = f_x + hyper.temperature * (1.0 + log_prob(bits, p))
    return theta - 2.0 * hyper.alpha * hyper.beta * coef * (bits - p)


@dataclass
class Population:
    """One iteration's batch of candidate masks plus feasibility flags."""

    problem: ProblemSpec
    bits: np.ndarray
    feasible: np.ndarray
    fallback_used: bool = False
    attempts: int = 0

    def masks(self) -> list[SelectionMask]:
        return [SelectionMask(self.problem, row) for row in self.bits]


def sample_population(theta, hyper: GibbsHyper, problem: ProblemSpec,
                      rng: np.random.Generator) -> Population:
    """Draw a population of Bernoulli(sigmoid_prob(theta)) masks.

    If no direct draw is feasible, the whole batch is regenerated through
    subset simulation (joint problems use the three-step construction).
    Repeated failures, including unsatisfiable constraints, end in
    FallbackExhausted after fallback_retry_cap + 1 rounds.
    """
    p = sigmoid_prob(theta, hyper.beta)
    n = hyper.population_size
    last_err = None
    for attempt in range(hyper.fallback_retry_cap + 1):
        bits = (rng.random((n, problem.n_bits)) < p).astype(np.uint8)
        feas = problem.feasible_many(bits)
        if feas.any():
            return Population(problem, bits, feas, False, attempt)
        if hyper.fallback == "none":
            continue
        try:
            if problem.mode == JOINT:
                masks = generate_joint_masks(problem, p, n, rng)
            else:
                masks = generate_user_masks(problem, p, n, rng)
        except (InfeasibleConstraints, LevelCapExceeded) as e:
            last_err = e
            continue
        bits = np.stack([m.bits for m in masks])
        return Population(problem, bits, np.ones(n, dtype=bool), True, attempt)
    raise FallbackExhausted(
        f"no feasible sample after {hyper.fallback_retry_cap + 1} rounds"
        + (f" (last: {last_err})" if last_err is not None else ""))


@dataclass
class RunTrace:
    """Per-iteration record of one optimize() run."""

    iter_best: list = field(default_factory=list)
    best_so_far: list = field(default_factory=list)
    chosen_bits: list = field(default_factory=list)
    cum_evals: list = field(default_factory=list)
    fallback_flags: list = field(default_factory=list)
    counter: EvalCounter = field(default_factory=EvalCounter)
    fallback_count: int = 0
    stopped: str = ""
    theta_final: np.ndarray | None = None

    @property
    def iterations(self) -> int:
        return len(self.iter_best)


def optimize(problem: ProblemSpec, ch: ChannelRealization,
             config: SystemConfig, hyper: GibbsHyper,
             rng: np.random.Generator):
    """Maximize spectral efficiency over selection masks.

    Runs the population update loop until the last stop_window per-iteration
    bests pairwise differ by less than stop_tol, or max_iterations.  Returns
    (best mask, best SE, RunTrace); the SE of repeated masks is memoized per
    run, so the trace counter reports distinct objective computations.
    """
    theta = np.zeros(problem.n_bits)
    trace = RunTrace()
    cache: dict[bytes, float | None] = {}
    best_bits = None
    best_se = -np.inf
    recent = deque(maxlen=hyper.stop_window)

    for _ in range(hyper.max_iterations):
        pop = sample_population(theta, hyper, problem, rng)
        if pop.fallback_used:
            trace.fallback_count += 1
        p = sigmoid_prob(theta, hyper.beta)

        it_bits = None
        it_se = -np.inf
        for i in np.flatnonzero(pop.feasible):
            row = pop.bits[i]
            key = row.tobytes()
            if key in cache:
                se = cache[key]
            else:
                try:
                    se = evaluate_selection(SelectionMask(problem, row), ch,
                                            config, trace.counter)
                except SingularChannel:
                    se = None
                cache[key] = se
            if se is not None and se > it_se:
                it_se = se
                it_bits = row

        if it_bits is None:
            # every feasible member hit an ill-conditioned submatrix;
            # resample without updating theta or the stop window
            continue

        if it_se > best_se:
            best_se = it_se
            best_bits = it_bits
        theta = theta_update(theta, it_bits, -it_se, p, hyper)

        trace.iter_best.append(it_se)
        trace.best_so_far.append(best_se)
        trace.chosen_bits.append(it_bits)
        trace.cum_evals.append(trace.counter.total)
        trace.fallback_flags.append(pop.fallback_used)

        recent.append(it_se)
        if len(recent) == hyper.stop_window:
            diffs = np.abs(np.diff(np.asarray(recent)))
            if np.all(diffs < hyper.stop_tol):
                trace.stopped = "window"
                break
    else:
        trace.stopped = "max_iterations"

    trace.theta_final = theta
    if best_bits is None:
        raise NoFeasibleMask("every evaluated selection was ill-conditioned")
    return SelectionMask(problem, best_bits), float(best_se), trace
