"""Single-cell topology and block-fading channel gains.

All positions are in metres with the eNB at the origin. Gains follow the
free-space model ``g = d**-2 * |h|**2`` with ``h ~ CN(0, 1)`` drawn once per
realization, so ``|h|**2`` is exponential with unit mean.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIN_LINK_DISTANCE = 1.0  # m, keeps d**-2 finite for very short links


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(watt):
    return 10.0 * np.log10(np.asarray(watt, dtype=float)) + 30.0


@dataclass(frozen=True)
class CellConfig:
    """Geometry and radio parameters of one cell."""

    cell_radius: float = 350.0
    num_cellular: int = 30
    num_d2d: int = 6
    max_d2d_distance: float = 35.0
    bandwidth: float = 180e3
    noise_psd: float = -174.0  # dBm/Hz
    rng_seed: int = 1

    def __post_init__(self):
        if not self.cell_radius > 0:
            raise ValueError(f"cell_radius must be > 0, got {self.cell_radius}")
        if self.num_cellular < 1:
            raise ValueError(f"num_cellular must be >= 1, got {self.num_cellular}")
        if self.num_d2d < 0:
            raise ValueError(f"num_d2d must be >= 0, got {self.num_d2d}")
        if not 0 < self.max_d2d_distance <= 2 * self.cell_radius:
            raise ValueError(
                "max_d2d_distance must lie in (0, 2*cell_radius], "
                f"got {self.max_d2d_distance}"
            )
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")

    @property
    def noise_power(self) -> float:
        """Thermal noise power over the channel bandwidth, in W."""
        return float(dbm_to_watt(self.noise_psd)) * self.bandwidth

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


@dataclass(frozen=True)
class Topology:
    cellular_positions: np.ndarray  # (K, 2)
    d2d_tx_positions: np.ndarray  # (D, 2)
    d2d_rx_positions: np.ndarray  # (D, 2)
    enb_position: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def num_cellular(self) -> int:
        return len(self.cellular_positions)

    @property
    def num_d2d(self) -> int:
        return len(self.d2d_tx_positions)

    def d2d_distances(self) -> np.ndarray:
        return np.linalg.norm(self.d2d_tx_positions - self.d2d_rx_positions, axis=1)


@dataclass(frozen=True)
class GainTable:
    """Channel power gains and noise for one fading realization.

    ``g_cross[j, d]`` is the gain from D2D transmitter ``j`` to D2D receiver
    ``d``; its diagonal repeats ``g_dd``.
    """

    g_ke: np.ndarray  # (K,) cellular UE -> eNB
    g_de: np.ndarray  # (D,) D2D tx -> eNB
    g_kd: np.ndarray  # (K, D) cellular UE -> D2D rx
    g_dd: np.ndarray  # (D,) D2D tx -> own rx
    g_cross: np.ndarray  # (D, D) D2D tx -> other D2D rx
    sigma2: float
    bandwidth: float

    @property
    def num_cellular(self) -> int:
        return len(self.g_ke)

    @property
    def num_d2d(self) -> int:
        return len(self.g_dd)


def sample_disc(rng: np.random.Generator, n: int, radius: float, center=(0.0, 0.0)) -> np.ndarray:
    """Draw ``n`` points uniformly (by area) on a disc."""
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((center[0] + r * np.cos(theta), center[1] + r * np.sin(theta)))


def generate_topology(config: CellConfig, rng: np.random.Generator | None = None) -> Topology:
    """Place K cellular UEs and D D2D pairs uniformly in the cell.

    Each receiver is drawn uniformly on the disc of radius
    ``max_d2d_distance`` around its transmitter and redrawn until it falls
    inside the cell.
    """
    if rng is None:
        rng = config.rng()
    K, D, R = config.num_cellular, config.num_d2d, config.cell_radius
    cellular = sample_disc(rng, K, R)
    tx = sample_disc(rng, D, R)
    rx = np.empty_like(tx)
    pending = np.arange(D)
    while pending.size:
        offsets = sample_disc(rng, pending.size, config.max_d2d_distance)
        candidates = tx[pending] + offsets
        inside = np.hypot(candidates[:, 0], candidates[:, 1]) <= R
        rx[pending[inside]] = candidates[inside]
        pending = pending[~inside]
    return Topology(cellular, tx, rx)


def _pathloss(distance: np.ndarray) -> np.ndarray:
    distance = np.asarray(distance, dtype=float)
    if np.any(distance == 0.0):
        raise ValueError("co-located transmitter and receiver (distance 0): invalid topology")
    return np.maximum(distance, MIN_LINK_DISTANCE) ** -2.0


def compute_gains(
    topology: Topology, config: CellConfig, rng: np.random.Generator | None = None
) -> GainTable:
    """Free-space pathloss times Rayleigh power fading for every link in the cell."""
    if rng is None:
        rng = config.rng()
    K, D = topology.num_cellular, topology.num_d2d
    cell, tx, rx = topology.cellular_positions, topology.d2d_tx_positions, topology.d2d_rx_positions
    enb = topology.enb_position

    dist_ke = np.linalg.norm(cell - enb, axis=1)
    dist_de = np.linalg.norm(tx - enb, axis=1)
    dist_kd = np.linalg.norm(cell[:, None, :] - rx[None, :, :], axis=2).reshape(K, D)
    dist_cross = np.linalg.norm(tx[:, None, :] - rx[None, :, :], axis=2).reshape(D, D)

    g_ke = _pathloss(dist_ke) * rng.exponential(size=K)
    g_de = _pathloss(dist_de) * rng.exponential(size=D)
    g_kd = _pathloss(dist_kd) * rng.exponential(size=(K, D))
    g_cross = _pathloss(dist_cross) * rng.exponential(size=(D, D))
    g_dd = np.diag(g_cross).copy()
    return GainTable(
        g_ke=g_ke,
        g_de=g_de,
        g_kd=g_kd,
        g_dd=g_dd,
        g_cross=g_cross,
        sigma2=config.noise_power,
        bandwidth=config.bandwidth,
    )


def realize(config: CellConfig, rng: np.random.Generator | None = None) -> tuple[Topology, GainTable]:
    """Topology and gains for one realization from a single random stream."""
    if rng is None:
        rng = config.rng()
    topology = generate_topology(config, rng)
    return topology, compute_gains(topology, config, rng)
