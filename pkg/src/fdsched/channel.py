"""Random channel generation: pathloss, shadowing, small-scale fading, SI.

One draw produces every complex channel matrix a selection could touch;
submatrix extraction happens later at evaluation time.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


@dataclass
class LinkBudget:
    """Large-scale terms of a set of links (diagnostics only)."""

    distance_m: np.ndarray
    pathloss_db: np.ndarray
    shadow_db: np.ndarray
    los: np.ndarray

    def linear_gain(self):
        return 10.0 ** (-(self.pathloss_db + self.shadow_db) / 10.0)


@dataclass
class ChannelRealization:
    """One draw of all channel matrices for a (config, seed) pair.

    h_u_full: (m, k_u), column j = channel of uplink user j to all antennas.
    h_d_full: (k_d, m), row k = channel from all antennas to downlink user k.
    g:        (k_d, k_u), entry (k, j) = interference from uplink user j
              into downlink user k.
    h_si_full: (m, m), residual self-interference between every
              (receive-antenna, transmit-antenna) pair.
    """

    h_u_full: np.ndarray
    h_d_full: np.ndarray
    g: np.ndarray
    h_si_full: np.ndarray
    budget_u: LinkBudget | None = None
    budget_d: LinkBudget | None = None
    budget_u2u: LinkBudget | None = None

    def fingerprint(self) -> str:
        """Short stable hash of the channel matrices (pairing audits)."""
        h = hashlib.sha256()
        for a in (self.h_u_full, self.h_d_full, self.g, self.h_si_full):
            h.update(np.ascontiguousarray(a).tobytes())
        return h.hexdigest()[:12]


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) i.i.d. entries (unit total variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _draw_positions(config: SystemConfig, n: int, rng: np.random.Generator):
    """Uniform positions in the annulus [min_dist, cell_radius] around the BS."""
    r0sq = config.min_dist_m ** 2
    r1sq = config.cell_radius_m ** 2
    r = np.sqrt(rng.uniform(r0sq, r1sq, size=n))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return r * np.cos(phi), r * np.sin(phi)


def _bs_user_budget(config: SystemConfig, dist, rng: np.random.Generator):
    los = rng.random(dist.shape) < config.pathloss.los_probability(dist)
    pl_db = config.pathloss.bs_user_db(dist, los)
    std = np.where(los, config.shadow_std_los_db, config.shadow_std_nlos_db)
    shadow_db = rng.standard_normal(dist.shape) * std
    return LinkBudget(dist, pl_db, shadow_db, los)


def draw_channels(config: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one channel realization.

    Users are placed uniformly in the cell annulus; each BS-user link gets a
    LOS/NLOS flag, a log-distance pathloss and log-normal shadowing, and the
    small-scale coefficients are i.i.d. CN(0,1) scaled by the root linear
    gain.  User-to-user links are always NLOS.  The SI matrix has non-zero
    mean sqrt(sigma2_si * kappa / (1 + kappa)) * hbar_si and per-entry
    variance sigma2_si / (1 + kappa).
    """
    m, k_u, k_d = config.m, config.k_u, config.k_d

    xu, yu = _draw_positions(config, k_u, rng)
    xd, yd = _draw_positions(config, k_d, rng)

    dist_u = np.hypot(xu, yu)
    budget_u = _bs_user_budget(config, dist_u, rng)
    h_u = _complex_normal(rng, (m, k_u)) * np.sqrt(budget_u.linear_gain())[None, :]

    dist_d = np.hypot(xd, yd)
    budget_d = _bs_user_budget(config, dist_d, rng)
    h_d = _complex_normal(rng, (k_d, m)) * np.sqrt(budget_d.linear_gain())[:, None]

    # user-to-user distances: rows = downlink users, cols = uplink users
    dist_uu = np.hypot(xd[:, None] - xu[None, :], yd[:, None] - yu[None, :])
    dist_uu = np.maximum(dist_uu, 1.0)  # co-located guard for the log law
    pl_uu = config.pathloss.u2u_db(dist_uu)
    shadow_uu = rng.standard_normal(dist_uu.shape) * config.shadow_std_u2u_db
    budget_uu = LinkBudget(dist_uu, pl_uu, shadow_uu,
                           np.zeros(dist_uu.shape, dtype=bool))
    g = _complex_normal(rng, (k_d, k_u)) * np.sqrt(budget_uu.linear_gain())

    si_mean = np.sqrt(config.sigma2_si_w * config.kappa / (1.0 + config.kappa))
    si_std = np.sqrt(config.sigma2_si_w / (1.0 + config.kappa))
    h_si = si_mean * config.effective_hbar_si() + si_std * _complex_normal(rng, (m, m))

    return ChannelRealization(h_u, h_d, g, h_si, budget_u, budget_d, budget_uu)
