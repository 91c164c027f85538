"""Objective evaluation: ZF precoding/detection and spectral efficiency.

Two interchangeable backends compute the mask-level objective:
a compiled extension (``fdsched._kernels``) and a pure-numpy fallback
(``fdsched._kernels_py``).  ``FDSCHED_BACKEND=py|ext`` forces the choice;
by default the extension is used when importable.

The per-step reference functions here (zf_precoder, zf_detector, ...)
are the readable form of the same math and back the test oracles.
"""

import os
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import Infeasible, SingularChannel
from .channel import ChannelRealization
from .selection import SelectionMask
from . import _kernels_py

_EXT = None
if os.environ.get("FDSCHED_BACKEND", "") != "py":
    try:
        from . import _kernels as _EXT  # type: ignore[attr-defined]
    except ImportError:
        _EXT = None
        if os.environ.get("FDSCHED_BACKEND", "") == "ext":
            raise


def active_backend() -> str:
    """Name of the kernel backend evaluate_selection dispatches to."""
    return "ext" if _EXT is not None else "py"


@dataclass
class EvalCounter:
    """Monotone objective-call counter, split by outcome.

    One counter per optimizer run / worker; merge() combines per-worker
    counters when evaluations were farmed out.
    """

    feasible: int = 0
    infeasible: int = 0
    singular: int = 0

    @property
    def total(self) -> int:
        return self.feasible + self.infeasible + self.singular

    def merge(self, other: "EvalCounter") -> None:
        self.feasible += other.feasible
        self.infeasible += other.infeasible
        self.singular += other.singular


def _gate_condition(a: np.ndarray, cond_cap: float) -> None:
    # 2-norm condition of the (hermitian PSD) Gram matrix
    if not np.all(np.isfinite(a)):
        raise SingularChannel("non-finite Gram matrix")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularChannel(f"Gram condition {cond:.3e} exceeds cap {cond_cap:.3e}")


def zf_precoder(h_d_sub: np.ndarray, cond_cap: float = 1e10) -> np.ndarray:
    """Normalized ZF precoder W = F_d/||F_d||_F, F_d = H^H (H H^H)^{-1}.

    h_d_sub has shape (n_d, m_t) with n_d <= m_t; returns (m_t, n_d).
    Raises SingularChannel when H H^H is ill-conditioned past cond_cap.
    """
    a = h_d_sub @ h_d_sub.conj().T
    _gate_condition(a, cond_cap)
    f_d = h_d_sub.conj().T @ np.linalg.inv(a)
    return f_d / np.linalg.norm(f_d)


def zf_detector(h_u_sub: np.ndarray, cond_cap: float = 1e10) -> np.ndarray:
    """ZF detector P = (H^H H)^{-1} H^H.

    h_u_sub has shape (m_r, n_u) with n_u <= m_r; returns (n_u, m_r).
    """
    a = h_u_sub.conj().T @ h_u_sub
    _gate_condition(a, cond_cap)
    return np.linalg.inv(a) @ h_u_sub.conj().T


def downlink_sinr(k: int, w: np.ndarray, h_d_sub: np.ndarray,
                  g_sub: np.ndarray, config: SystemConfig) -> float:
    """SINR of downlink user k under precoder w and uplink interferers g_sub."""
    signal = config.p_d_w * np.abs(h_d_sub[k] @ w[:, k]) ** 2
    interference = config.p_u_w * float(np.sum(np.abs(g_sub[k]) ** 2))
    return float(signal / (interference + config.sigma2_dl_w))


def uplink_sinr(k: int, p: np.ndarray, h_si_sub: np.ndarray,
                w: np.ndarray, config: SystemConfig) -> float:
    """SINR of uplink user k: ZF leaves p_u over residual SI plus shaped noise."""
    if w.shape[1] > 0:
        through = p[k] @ h_si_sub @ w  # row vector over downlink streams
        si = config.p_d_w * float(np.sum(np.abs(through) ** 2))
    else:
        si = 0.0
    noise = config.sigma2_bs_w * float(np.sum(np.abs(p[k]) ** 2))
    return float(config.p_u_w / (si + noise))


def spectral_efficiency(uplink_sinrs, downlink_sinrs) -> float:
    gu = np.asarray(uplink_sinrs, dtype=float)
    gd = np.asarray(downlink_sinrs, dtype=float)
    return float(np.sum(np.log2(1.0 + gu)) + np.sum(np.log2(1.0 + gd)))


def _eval_reference(mask: SelectionMask, ch: ChannelRealization,
                    config: SystemConfig) -> float:
    """Composed per-step pipeline; slow path kept for cross-checks."""
    d = mask.problem.decode(mask.bits)
    n_u, n_d = len(d.uplink_users), len(d.downlink_users)
    cap = config.cond_cap

    gamma_d = []
    w = np.zeros((len(d.tx_antennas), 0), dtype=complex)
    if n_d > 0:
        h_d_sub = ch.h_d_full[np.ix_(d.downlink_users, d.tx_antennas)]
        w = zf_precoder(h_d_sub, cap)
        g_sub = ch.g[np.ix_(d.downlink_users, d.uplink_users)]
        gamma_d = [downlink_sinr(k, w, h_d_sub, g_sub, config) for k in range(n_d)]

    gamma_u = []
    if n_u > 0:
        h_u_sub = ch.h_u_full[np.ix_(d.recv_antennas, d.uplink_users)]
        p = zf_detector(h_u_sub, cap)
        h_si_sub = ch.h_si_full[np.ix_(d.recv_antennas, d.tx_antennas)]
        gamma_u = [uplink_sinr(k, p, h_si_sub, w, config) for k in range(n_u)]

    return spectral_efficiency(gamma_u, gamma_d)


_STATUS_MSG = {1: "downlink Gram not positive definite",
               2: "downlink Gram condition exceeds cap",
               3: "uplink Gram not positive definite",
               4: "uplink Gram condition exceeds cap"}


def evaluate_selection(mask: SelectionMask, ch: ChannelRealization,
                       config: SystemConfig,
                       counter: EvalCounter | None = None,
                       backend: str | None = None) -> float:
    """Objective value (SE, bits/s/Hz) of one selection mask.

    The single entry point every search algorithm calls.  Feasibility
    (cardinality floors/ceilings) is checked before any linear algebra;
    Infeasible and SingularChannel increment the counter on their own
    tallies so callers can report both.
    """
    if counter is None:
        counter = EvalCounter()
    if not mask.problem.feasible(mask.bits):
        counter.infeasible += 1
        raise Infeasible(f"cardinalities {mask.problem.cardinalities(mask.bits)} "
                         "violate selection bounds")

    if backend == "reference":
        try:
            se = _eval_reference(mask, ch, config)
        except SingularChannel:
            counter.singular += 1
            raise
        counter.feasible += 1
        return se

    if backend is None:
        kern = _EXT if _EXT is not None else _kernels_py
    elif backend == "ext":
        if _EXT is None:
            raise RuntimeError("compiled backend requested but not importable")
        kern = _EXT
    elif backend == "py":
        kern = _kernels_py
    else:
        raise ValueError(f"unknown backend {backend!r}")

    d = mask.problem.decode(mask.bits)
    status, se = kern.eval_mask(
        ch.h_u_full, ch.h_d_full, ch.g, ch.h_si_full,
        np.ascontiguousarray(d.uplink_users, dtype=np.int64),
        np.ascontiguousarray(d.downlink_users, dtype=np.int64),
        np.ascontiguousarray(d.recv_antennas, dtype=np.int64),
        np.ascontiguousarray(d.tx_antennas, dtype=np.int64),
        config.p_u_w, config.p_d_w, config.sigma2_bs_w, config.sigma2_dl_w,
        config.cond_cap)
    if status != 0:
        counter.singular += 1
        raise SingularChannel(_STATUS_MSG.get(status, f"kernel status {status}"))
    counter.feasible += 1
    return float(se)
