"""Energy-efficient channel and power allocation for D2D underlay links.

Pairs of devices reuse cellular uplink channels. Channels are sold in a
two-round combinatorial auction whose valuations come from a power-control
game in which every UE maximizes its expected data over battery lifetime.
"""
from .auction import Allocation, Valuator, allocate, combinatorial_utility, compute_bids, round_one, round_two
from .baselines import ca_fixed_power_allocate, greedy_allocate, run_algorithm
from .channel_model import CellConfig, GainTable, Topology, compute_gains, generate_topology, realize
from .metrics import MetricsRecord, SweepSpec, evaluate, run_sweep
from .power_game import (
    ChannelGame,
    EquilibriumResult,
    GameParams,
    best_response,
    channel_quality,
    f_value,
    lifetime,
    optimal_power,
    rate,
    solve_equilibrium,
    uniqueness_check,
    utility,
)

__version__ = "0.1.0"
