"""System-level configuration: geometry, powers, pathloss laws, SI statistics.

All powers and variances are linear watts internally; dB conversions happen
only at the config-file and CSV boundaries.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError


@dataclass
class PathlossParams:
    """Log-distance pathloss laws PL(d) = a + b*log10(d_km), in dB.

    Defaults are picocell constants (2 GHz): separate laws for BS-user LOS,
    BS-user NLOS and user-to-user links, plus the two length scales of the
    distance-based LOS probability
    p_los(d) = 0.5 - min(0.5, 5 exp(-d1/d)) + min(0.5, 5 exp(-d/d2)).
    """

    los_a: float = 103.8
    los_b: float = 20.9
    nlos_a: float = 145.4
    nlos_b: float = 37.5
    u2u_a: float = 98.45
    u2u_b: float = 20.0
    los_prob_d1_m: float = 156.0
    los_prob_d2_m: float = 30.0

    def bs_user_db(self, d_m, los):
        """Pathloss in dB for a BS-user link at distance d_m (meters)."""
        d_km = np.asarray(d_m, dtype=float) / 1000.0
        los = np.asarray(los, dtype=bool)
        pl_los = self.los_a + self.los_b * np.log10(d_km)
        pl_nlos = self.nlos_a + self.nlos_b * np.log10(d_km)
        return np.where(los, pl_los, pl_nlos)

    def u2u_db(self, d_m):
        """Pathloss in dB for a user-to-user link (always NLOS)."""
        d_km = np.asarray(d_m, dtype=float) / 1000.0
        return self.u2u_a + self.u2u_b * np.log10(d_km)

    def los_probability(self, d_m):
        d = np.asarray(d_m, dtype=float)
        return (
            0.5
            - np.minimum(0.5, 5.0 * np.exp(-self.los_prob_d1_m / d))
            + np.minimum(0.5, 5.0 * np.exp(-d / self.los_prob_d2_m))
        )


@dataclass
class SystemConfig:
    """Physical and geometric parameters of the full-duplex single cell.

    Defaults describe the small desk-scale scenario: a 40 m picocell at
    2 GHz, 6 BS antennas, 3 uplink and 3 downlink candidate users, Rician
    SI with kappa = 1 and -100 dB residual SI power.
    """

    m: int = 6                      # BS antennas
    k_u: int = 3                    # uplink-requesting users
    k_d: int = 3                    # downlink-requesting users
    p_u_w: float = 3.0e-5           # uplink per-user transmit power (W)
    p_d_w: float = 3.0e-5           # downlink total transmit power (W)
    sigma2_bs_w: float = 1.0e-13    # AWGN variance at the BS (W)
    sigma2_dl_w: float = 1.0e-13    # AWGN variance per downlink user (W)
    kappa: float = 1.0              # Rician factor of the SI channel
    sigma2_si_w: float = 1.0e-10    # residual SI power, linear (-100 dB)
    hbar_si: np.ndarray | None = None   # constant SI mean matrix; None -> all-ones
    cell_radius_m: float = 40.0
    min_dist_m: float = 10.0
    carrier_ghz: float = 2.0        # informational; the laws bake the carrier in
    shadow_std_los_db: float = 3.0
    shadow_std_nlos_db: float = 4.0
    shadow_std_u2u_db: float = 6.0
    pathloss: PathlossParams = field(default_factory=PathlossParams)
    k_min_u: int = 1                # minimum active uplink users
    k_min_d: int = 1                # minimum active downlink users
    cond_cap: float = 1.0e10        # Gram-matrix condition cap for ZF
    snr_ref_dist_m: float | None = None  # SNR reference distance; None -> cell radius

    def __post_init__(self):
        self.validate()

    def validate(self):
        checks = [
            (self.m >= 2, "m >= 2"),
            (self.k_u >= 1, "k_u >= 1"),
            (self.k_d >= 1, "k_d >= 1"),
            (self.p_u_w > 0, "p_u_w > 0"),
            (self.p_d_w > 0, "p_d_w > 0"),
            (self.sigma2_bs_w > 0, "sigma2_bs_w > 0"),
            (self.sigma2_dl_w > 0, "sigma2_dl_w > 0"),
            (self.sigma2_si_w > 0, "sigma2_si_w > 0"),
            (self.kappa >= 0, "kappa >= 0"),
            (0 < self.min_dist_m < self.cell_radius_m,
             "0 < min_dist_m < cell_radius_m"),
            (0 <= self.k_min_u <= self.k_u, "0 <= k_min_u <= k_u"),
            (0 <= self.k_min_d <= self.k_d, "0 <= k_min_d <= k_d"),
            (self.shadow_std_los_db >= 0, "shadow_std_los_db >= 0"),
            (self.shadow_std_nlos_db >= 0, "shadow_std_nlos_db >= 0"),
            (self.shadow_std_u2u_db >= 0, "shadow_std_u2u_db >= 0"),
            (self.cond_cap > 1, "cond_cap > 1"),
        ]
        for ok, name in checks:
            if not ok:
                raise ValidationError(f"config invariant violated: {name}")
        if self.hbar_si is not None:
            hbar = np.asarray(self.hbar_si)
            if hbar.shape != (self.m, self.m):
                raise ValidationError(
                    f"hbar_si must be {self.m}x{self.m}, got {hbar.shape}"
                )

    def effective_hbar_si(self):
        if self.hbar_si is None:
            return np.ones((self.m, self.m), dtype=complex)
        return np.asarray(self.hbar_si, dtype=complex)

    def reference_gain(self):
        """Mean linear pathloss gain at the SNR reference distance.

        LOS-probability-weighted mixture of the two BS-user laws; shadowing
        is excluded so the SNR-to-power mapping stays deterministic.
        """
        d = self.snr_ref_dist_m if self.snr_ref_dist_m is not None else self.cell_radius_m
        p_los = float(self.pathloss.los_probability(d))
        g_los = 10.0 ** (-float(self.pathloss.bs_user_db(d, True)) / 10.0)
        g_nlos = 10.0 ** (-float(self.pathloss.bs_user_db(d, False)) / 10.0)
        return p_los * g_los + (1.0 - p_los) * g_nlos

    def p_u_for_snr_db(self, snr_db: float) -> float:
        """Uplink power giving the requested received SNR at the reference distance."""
        return 10.0 ** (snr_db / 10.0) * self.sigma2_bs_w / self.reference_gain()

    def with_snr_eta(self, snr_db: float, eta: float, k_min: int | None = None):
        """Copy of this config with powers set from (SNR, eta = p_d/p_u)."""
        p_u = self.p_u_for_snr_db(snr_db)
        kw = dict(p_u_w=p_u, p_d_w=eta * p_u)
        if k_min is not None:
            kw.update(k_min_u=k_min, k_min_d=k_min)
        return replace(self, **kw)
