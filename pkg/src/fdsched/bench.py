"""Micro-benchmark of the compiled objective kernel vs the pure-Python path."""

import time

import numpy as np

from .channel import draw_channels
from .config import SystemConfig
from .evaluate import active_backend, evaluate_selection
from .selection import ProblemSpec, SelectionMask


def _feasible_masks(problem, rng, count):
    masks = []
    while len(masks) < count:
        bits = (rng.random(problem.n_bits) < 0.5).astype(np.uint8)
        if problem.feasible(bits):
            masks.append(SelectionMask(problem, bits))
    return masks


def benchmark_backends(m: int = 14, k_u: int = 5, k_d: int = 5,
                       n_masks: int = 300, repeats: int = 3,
                       seed: int = 0) -> dict:
    """Time both backends over the same masks; returns per-eval stats in us.

    The compiled extension is skipped (reported as None) when it is not
    importable in this interpreter.
    """
    cfg = SystemConfig(m=m, k_u=k_u, k_d=k_d)
    rng = np.random.default_rng(seed)
    ch = draw_channels(cfg, rng)
    problem = ProblemSpec.joint(cfg)
    masks = _feasible_masks(problem, rng, n_masks)

    def timed(backend):
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            acc = 0.0
            for mask in masks:
                acc += evaluate_selection(mask, ch, cfg, backend=backend)
            dt = time.perf_counter() - t0
            best = min(best, dt)
        return best / n_masks * 1e6, acc

    py_us, py_acc = timed("py")
    result = {
        "active_backend": active_backend(),
        "n_masks": n_masks,
        "m": m, "k_u": k_u, "k_d": k_d,
        "py_us_per_eval": py_us,
        "ext_us_per_eval": None,
        "speedup": None,
    }
    try:
        ext_us, ext_acc = timed("ext")
    except (ImportError, RuntimeError):
        return result
    if abs(ext_acc - py_acc) > 1e-6 * max(abs(py_acc), 1.0):
        raise AssertionError(
            f"backend mismatch: py sum {py_acc!r} vs ext sum {ext_acc!r}")
    result["ext_us_per_eval"] = ext_us
    result["speedup"] = py_us / ext_us
    return result


def format_benchmark(result: dict) -> str:
    lines = [
        f"objective kernel benchmark (m={result['m']}, k_u={result['k_u']}, "
        f"k_d={result['k_d']}, {result['n_masks']} masks)",
        f"  active backend     : {result['active_backend']}",
        f"  pure python        : {result['py_us_per_eval']:.1f} us/eval",
    ]
    if result["ext_us_per_eval"] is None:
        lines.append("  compiled extension : not available")
    else:
        lines.append(f"  compiled extension : "
                     f"{result['ext_us_per_eval']:.1f} us/eval")
        lines.append(f"  speedup            : {result['speedup']:.2f}x")
    return "\n".join(lines)
