"""Binary selection masks and the two scheduling problem layouts.

Joint layout: the first k_u bits activate uplink users, the next k_d bits
activate downlink users, and the last m bits set each BS antenna to
receive (1) or transmit (0) mode.  User-only layout: k_u + k_d bits with a
fixed, externally supplied antenna split.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

JOINT = "joint"
USER_ONLY = "user-only"


class Decoded(NamedTuple):
    """Index sets of one selection (antenna indices into 0..m-1)."""

    uplink_users: np.ndarray
    downlink_users: np.ndarray
    recv_antennas: np.ndarray
    tx_antennas: np.ndarray


@dataclass(frozen=True)
class ProblemSpec:
    """One combinatorial scheduling problem over binary masks."""

    mode: str
    k_u: int
    k_d: int
    m: int
    k_min_u: int
    k_min_d: int
    recv_antennas: tuple = ()   # user-only mode: fixed receive-antenna indices
    tx_antennas: tuple = ()     # user-only mode: fixed transmit-antenna indices

    def __post_init__(self):
        if self.mode not in (JOINT, USER_ONLY):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == USER_ONLY:
            split = sorted(self.recv_antennas) + sorted(self.tx_antennas)
            if sorted(split) != list(range(self.m)):
                raise ValueError("user-only mode needs a partition of the antennas")

    @property
    def n_bits(self) -> int:
        n = self.k_u + self.k_d
        return n + self.m if self.mode == JOINT else n

    @classmethod
    def joint(cls, config):
        return cls(JOINT, config.k_u, config.k_d, config.m,
                   config.k_min_u, config.k_min_d)

    @classmethod
    def user_only(cls, config, m_r: int):
        """Fixed split: the first m_r antennas receive, the rest transmit."""
        recv = tuple(range(m_r))
        tx = tuple(range(m_r, config.m))
        return cls(USER_ONLY, config.k_u, config.k_d, config.m,
                   config.k_min_u, config.k_min_d, recv, tx)

    def relax_floors(self):
        """Same problem with k_min floors dropped (used for partial scoring)."""
        return ProblemSpec(self.mode, self.k_u, self.k_d, self.m, 0, 0,
                           self.recv_antennas, self.tx_antennas)

    def decode(self, bits: np.ndarray) -> Decoded:
        bits = np.asarray(bits)
        u = np.flatnonzero(bits[: self.k_u]).astype(np.int64)
        d = np.flatnonzero(bits[self.k_u: self.k_u + self.k_d]).astype(np.int64)
        if self.mode == JOINT:
            ant = bits[self.k_u + self.k_d:]
            recv = np.flatnonzero(ant).astype(np.int64)
            tx = np.flatnonzero(ant == 0).astype(np.int64)
        else:
            recv = np.asarray(self.recv_antennas, dtype=np.int64)
            tx = np.asarray(self.tx_antennas, dtype=np.int64)
        return Decoded(u, d, recv, tx)

    def cardinalities(self, bits: np.ndarray):
        """(n_u, n_d, m_r, m_t) of one mask without building index arrays."""
        bits = np.asarray(bits)
        n_u = int(bits[: self.k_u].sum())
        n_d = int(bits[self.k_u: self.k_u + self.k_d].sum())
        if self.mode == JOINT:
            m_r = int(bits[self.k_u + self.k_d:].sum())
            m_t = self.m - m_r
        else:
            m_r = len(self.recv_antennas)
            m_t = len(self.tx_antennas)
        return n_u, n_d, m_r, m_t

    def feasible(self, bits: np.ndarray) -> bool:
        n_u, n_d, m_r, m_t = self.cardinalities(bits)
        return (self.k_min_u <= n_u <= m_r) and (self.k_min_d <= n_d <= m_t)

    def feasible_many(self, bits_2d: np.ndarray) -> np.ndarray:
        """Vectorized feasibility flags for a (N, n_bits) array of masks."""
        bits_2d = np.asarray(bits_2d)
        n_u = bits_2d[:, : self.k_u].sum(axis=1)
        n_d = bits_2d[:, self.k_u: self.k_u + self.k_d].sum(axis=1)
        if self.mode == JOINT:
            m_r = bits_2d[:, self.k_u + self.k_d:].sum(axis=1)
            m_t = self.m - m_r
        else:
            m_r = len(self.recv_antennas)
            m_t = len(self.tx_antennas)
        return ((self.k_min_u <= n_u) & (n_u <= m_r)
                & (self.k_min_d <= n_d) & (n_d <= m_t))


@dataclass(frozen=True)
class SelectionMask:
    """A binary scheduling decision tied to its problem layout."""

    problem: ProblemSpec
    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.shape != (self.problem.n_bits,):
            raise ValueError(
                f"mask needs {self.problem.n_bits} bits, got shape {bits.shape}"
            )
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("mask bits must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def decode(self) -> Decoded:
        return self.problem.decode(self.bits)

    def is_feasible(self) -> bool:
        return self.problem.feasible(self.bits)

    def __eq__(self, other):
        return (isinstance(other, SelectionMask)
                and self.problem == other.problem
                and np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.problem, self.bits.tobytes()))
