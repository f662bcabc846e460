"""Reference allocators: greedy SNR heuristic and fixed-power auction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auction import Allocation, Valuator, _finish, allocate
from .power_game import GameParams

GREEDY = "greedy"
CA = "ca"
CA_FIXED = "ca-fixed"
ALGORITHMS = (CA, GREEDY, CA_FIXED)


@dataclass(frozen=True)
class BaselineKind:
    tag: str = "greedy_heuristic"
    fixed_power: float = 0.05

    def __post_init__(self):
        if self.tag not in ("greedy_heuristic", "ca_fixed_power"):
            raise ValueError(f"unknown baseline {self.tag!r}")


def greedy_allocate(
    gains,
    params: GameParams,
    pair_gain: str = "g_de",
    valuator: Valuator | None = None,
) -> Allocation:
    """Greedy heuristic with the power game re-solved on each touched channel.

    Channels are queued by cellular uplink SNR (highest first); the head of
    the queue takes the unplaced pair with the smallest ``pair_gain``
    (``"g_de"``, interference to the eNB, or ``"g_dd"``). The queue is
    refilled in the same order when it runs dry before all pairs are placed.
    """
    if pair_gain not in ("g_de", "g_dd"):
        raise ValueError(f"pair_gain must be 'g_de' or 'g_dd', got {pair_gain!r}")
    valuator = valuator or Valuator(gains, params)
    K, D = gains.num_cellular, gains.num_d2d
    snr = params.p_bar * gains.g_ke / gains.sigma2
    order = [int(k) for k in np.argsort(-snr, kind="stable")]
    key = getattr(gains, pair_gain)
    remaining = sorted(range(D), key=lambda d: (key[d], d))
    packages: list[list[int]] = [[] for _ in range(K)]
    for step, d in enumerate(remaining):
        k = order[step % K]
        packages[k].append(d)
        valuator.result(k, packages[k])
    return _finish(packages, valuator)


def ca_fixed_power_allocate(gains, params: GameParams, fixed_power: float = 0.05) -> Allocation:
    """The auction with every UE pinned at ``fixed_power`` instead of playing the game."""
    if not 0 < fixed_power <= params.p_bar:
        raise ValueError(f"fixed_power must lie in (0, p_bar], got {fixed_power}")
    return allocate(gains, params, Valuator(gains, params, fixed_power=fixed_power))


def run_algorithm(name: str, gains, params: GameParams, fixed_power: float = 0.05, **options) -> Allocation:
    if name == CA:
        return allocate(gains, params, restore_on_reject=options.get("restore_on_reject", False))
    if name == GREEDY:
        return greedy_allocate(gains, params, pair_gain=options.get("pair_gain", "g_de"))
    if name == CA_FIXED:
        return ca_fixed_power_allocate(gains, params, fixed_power)
    raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
