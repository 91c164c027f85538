"""Ground-truth and baseline schedulers.

exhaustive_search enumerates every mask (within a hard cap) and is the
reference the stochastic optimizer is judged against.  The random and
greedy baselines bracket it from below.
"""

import numpy as np

from .channel import ChannelRealization
from .config import SystemConfig
from .errors import (Infeasible, NoFeasibleMask, SingularChannel,
                     SpaceTooLarge, ValidationError)
from .evaluate import EvalCounter, evaluate_selection
from .selection import JOINT, ProblemSpec, SelectionMask
from .subset import generate_joint_masks, generate_user_masks

SPACE_CAP_DEFAULT = 2 ** 26
_ENUM_BLOCK = 1 << 16


def _enumerate_bits(n_bits: int, start: int, stop: int) -> np.ndarray:
    # bit i of the integer becomes column i, so mask value = sum bits[i] << i
    v = np.arange(start, stop, dtype=np.uint64)
    return ((v[:, None] >> np.arange(n_bits, dtype=np.uint64)) & 1).astype(np.uint8)


def exhaustive_search(problem: ProblemSpec, ch: ChannelRealization,
                      config: SystemConfig, counter: EvalCounter | None = None,
                      cap: int = SPACE_CAP_DEFAULT):
    """Enumerate all 2^n masks; return (best mask, best SE, evaluations).

    Cardinality-infeasible masks are screened out vectorized before any
    matrix work and do not count as evaluations.  Ties go to the lowest
    mask value (bit 0 least significant).  Raises SpaceTooLarge past the
    cap and NoFeasibleMask when nothing survives.
    """
    n = problem.n_bits
    if 2 ** n > cap:
        raise SpaceTooLarge(f"2^{n} masks exceeds cap {cap}")
    if counter is None:
        counter = EvalCounter()
    best_bits = None
    best_se = -np.inf
    evals = 0
    for start in range(0, 2 ** n, _ENUM_BLOCK):
        block = _enumerate_bits(n, start, min(start + _ENUM_BLOCK, 2 ** n))
        for row in block[problem.feasible_many(block)]:
            try:
                se = evaluate_selection(SelectionMask(problem, row), ch,
                                        config, counter)
            except SingularChannel:
                evals += 1
                continue
            evals += 1
            if se > best_se:  # strict: first (lowest-value) mask wins ties
                best_se = se
                best_bits = row
    if best_bits is None:
        raise NoFeasibleMask("no feasible mask evaluated successfully")
    return SelectionMask(problem, best_bits), float(best_se), evals


def random_feasible_baseline(problem: ProblemSpec, ch: ChannelRealization,
                             config: SystemConfig, rng: np.random.Generator,
                             draws: int, counter: EvalCounter | None = None):
    """Best SE among `draws` feasible masks sampled uniformly by rejection.

    When rejection stalls (rare feasible set) the remaining masks come from
    subset simulation at p = 1/2.  Returns (best mask, best SE).
    """
    if draws < 1:
        raise ValidationError(f"draws must be >= 1, got {draws}")
    n = problem.n_bits
    collected: list[np.ndarray] = []
    stall_cap = 200 * max(draws, 64)
    tried = 0
    while len(collected) < draws and tried < stall_cap:
        batch = (rng.random((64, n)) < 0.5).astype(np.uint8)
        tried += 64
        for row in batch[problem.feasible_many(batch)]:
            collected.append(row)
            if len(collected) == draws:
                break
    if len(collected) < draws:
        p = np.full(n, 0.5)
        short = draws - len(collected)
        if problem.mode == JOINT:
            masks = generate_joint_masks(problem, p, max(short, 10), rng)
        else:
            masks = generate_user_masks(problem, p, max(short, 10), rng)
        collected.extend(m.bits for m in masks[:short])

    best_bits = None
    best_se = -np.inf
    for row in collected:
        try:
            se = evaluate_selection(SelectionMask(problem, row), ch, config,
                                    counter)
        except SingularChannel:
            continue
        if se > best_se:
            best_se = se
            best_bits = row
    if best_bits is None:
        raise NoFeasibleMask("all sampled masks were ill-conditioned")
    return SelectionMask(problem, best_bits), float(best_se)


def greedy_successive_selection(problem: ProblemSpec, ch: ChannelRealization,
                                config: SystemConfig,
                                counter: EvalCounter | None = None):
    """Greedy user addition for the fixed-split problem; returns (mask, SE).

    Each step adds the single user (either direction) with the largest SE
    increase that respects the upper bounds.  Unmet k_min floors are filled
    first, restricted to deficient directions and accepted even when the
    marginal SE is negative; afterwards additions continue only while they
    improve SE.  Deterministic: ties go to the lowest bit index.
    """
    if problem.mode == JOINT:
        raise ValidationError("greedy baseline is defined for user-only mode")
    k_u, k_d = problem.k_u, problem.k_d
    cap_u = min(k_u, len(problem.recv_antennas))
    cap_d = min(k_d, len(problem.tx_antennas))
    if problem.k_min_u > cap_u or problem.k_min_d > cap_d:
        raise NoFeasibleMask(
            f"floors ({problem.k_min_u},{problem.k_min_d}) exceed caps "
            f"({cap_u},{cap_d})")

    relaxed = problem.relax_floors()
    bits = np.zeros(problem.n_bits, dtype=np.uint8)

    def score(candidate: np.ndarray) -> float:
        try:
            return evaluate_selection(SelectionMask(relaxed, candidate), ch,
                                      config, counter)
        except (Infeasible, SingularChannel):
            return -np.inf

    current_se = 0.0  # empty selection transmits nothing
    while True:
        s_u = int(bits[:k_u].sum())
        s_d = int(bits[k_u:].sum())
        need_u = s_u < problem.k_min_u
        need_d = s_d < problem.k_min_d
        candidates = []
        for i in range(problem.n_bits):
            if bits[i]:
                continue
            is_ul = i < k_u
            if is_ul and s_u >= cap_u:
                continue
            if not is_ul and s_d >= cap_d:
                continue
            if (need_u or need_d) and not (need_u and is_ul
                                           or need_d and not is_ul):
                continue  # floor phase: only deficit-reducing additions
            candidates.append(i)
        if not candidates:
            break
        scores = []
        for i in candidates:
            trial = bits.copy()
            trial[i] = 1
            scores.append(score(trial))
        j = int(np.argmax(scores))  # argmax keeps the lowest index on ties
        if not (need_u or need_d) and scores[j] <= current_se:
            break
        if scores[j] == -np.inf:
            j = 0  # forced floor fill through an ill-conditioned step
        bits[candidates[j]] = 1
        current_se = scores[j]

    mask = SelectionMask(problem, bits)
    return mask, evaluate_selection(mask, ch, config, counter)
