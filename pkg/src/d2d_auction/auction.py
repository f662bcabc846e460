"""Two-round iterative combinatorial auction for D2D channel reuse.

D2D pairs bid for cellular channels; a channel's value is the summed
equilibrium utility of everyone on it. Round one greedily sells the
highest marginal bid until every pair holds a channel. Round two kicks the
pair whose removal helps its package most and lets it rebid elsewhere,
keeping the move only if the system gains.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .power_game import (
    ChannelGame,
    EquilibriumResult,
    GameParams,
    fixed_power_result,
    solve_equilibrium,
)

MASKED = -np.inf


def combinatorial_utility(channel, package, gains, params: GameParams, fixed_power=None):
    """Summed equilibrium utility of cellular UE ``channel`` and the pairs in ``package``."""
    game = ChannelGame.from_package(gains, channel, sorted(package))
    if fixed_power is None:
        result = solve_equilibrium(game, params)
    else:
        result = fixed_power_result(game, params, fixed_power)
    return result.total_utility, result


class Valuator:
    """Memoized package valuations for one gain table.

    Counts the equilibrium solves actually performed and how many of them
    hit the iteration cap.
    """

    def __init__(self, gains, params: GameParams, fixed_power: float | None = None):
        self.gains = gains
        self.params = params
        self.fixed_power = fixed_power
        self.solves = 0
        self.nonconverged = 0
        self._cache: dict[tuple, tuple[float, EquilibriumResult]] = {}

    def result(self, channel: int, package) -> EquilibriumResult:
        return self._lookup(channel, package)[1]

    def value(self, channel: int, package) -> float:
        return self._lookup(channel, package)[0]

    def _lookup(self, channel, package):
        key = (int(channel), tuple(sorted(int(d) for d in package)))
        hit = self._cache.get(key)
        if hit is None:
            hit = combinatorial_utility(key[0], key[1], self.gains, self.params, self.fixed_power)
            self.solves += 1
            if not hit[1].converged:
                self.nonconverged += 1
            self._cache[key] = hit
        return hit


@dataclass
class Allocation:
    """Partition of D2D pairs over channels plus per-channel equilibria."""

    packages: list[list[int]]
    equilibria: list[EquilibriumResult]
    utilities: np.ndarray
    solves: int = 0
    nonconverged: int = 0
    history: list[float] = field(default_factory=list)
    moves: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def total_utility(self) -> float:
        return float(np.sum(self.utilities))

    @property
    def num_channels(self) -> int:
        return len(self.packages)

    def channel_of(self) -> dict[int, int]:
        return {d: k for k, pkg in enumerate(self.packages) for d in pkg}

    def check_partition(self, num_d2d: int) -> None:
        """Raise if a pair is in two packages or is missing."""
        seen = [d for pkg in self.packages for d in pkg]
        if len(seen) != len(set(seen)):
            raise AssertionError(f"packages overlap: {self.packages}")
        if set(seen) != set(range(num_d2d)):
            raise AssertionError(f"packages do not cover all {num_d2d} pairs: {self.packages}")


@dataclass
class BidMatrix:
    bids: np.ndarray  # (K, D), MASKED for assigned bidders
    baseline: np.ndarray  # (K,) current package utilities


def _finish(packages, valuator: Valuator, history=None, moves=None) -> Allocation:
    packages = [sorted(pkg) for pkg in packages]
    equilibria = [valuator.result(k, pkg) for k, pkg in enumerate(packages)]
    return Allocation(
        packages=packages,
        equilibria=equilibria,
        utilities=np.array([eq.total_utility for eq in equilibria]),
        solves=valuator.solves,
        nonconverged=valuator.nonconverged,
        history=list(history or []),
        moves=list(moves or []),
    )


def compute_bids(packages, unassigned, gains, params, valuator: Valuator | None = None) -> BidMatrix:
    """Marginal bids ``U_k(D_k + d) - U_k(D_k)`` for every unassigned pair and channel."""
    valuator = valuator or Valuator(gains, params)
    K, D = gains.num_cellular, gains.num_d2d
    baseline = np.array([valuator.value(k, packages[k]) for k in range(K)])
    bids = np.full((K, D), MASKED)
    for d in sorted(unassigned):
        for k in range(K):
            bids[k, d] = valuator.value(k, [*packages[k], d]) - baseline[k]
    return BidMatrix(bids, baseline)


def round_one(gains, params: GameParams, valuator: Valuator | None = None) -> Allocation:
    """Sell channels to the highest marginal bid until every pair is placed."""
    valuator = valuator or Valuator(gains, params)
    K, D = gains.num_cellular, gains.num_d2d
    packages: list[list[int]] = [[] for _ in range(K)]
    unassigned = set(range(D))
    table = compute_bids(packages, unassigned, gains, params, valuator)
    bids, baseline = table.bids, table.baseline
    for _ in range(D):
        # row-major argmax: lowest channel, then lowest pair, on ties
        k_star, d_star = np.unravel_index(int(np.argmax(bids)), bids.shape)
        packages[k_star].append(int(d_star))
        unassigned.discard(int(d_star))
        bids[:, d_star] = MASKED
        baseline[k_star] = valuator.value(k_star, packages[k_star])
        for d in sorted(unassigned):
            bids[k_star, d] = valuator.value(k_star, [*packages[k_star], d]) - baseline[k_star]
    return _finish(packages, valuator)


def round_two(
    state: Allocation,
    gains,
    params: GameParams,
    valuator: Valuator | None = None,
    restore_on_reject: bool = False,
) -> Allocation:
    """Kick-and-rebid adjustment; each pair is adjusted at most once.

    The pair whose removal raises its package utility the most is taken
    out and offered to every other channel. The move is kept when the
    removal gain plus the best insertion gain is positive. Otherwise the
    round stops, or with ``restore_on_reject`` the pair is put back and
    the next candidate is tried.
    """
    valuator = valuator or Valuator(gains, params)
    K = gains.num_cellular
    packages = [list(pkg) for pkg in state.packages]
    adjusted: set[int] = set()
    history = [sum(valuator.value(k, pkg) for k, pkg in enumerate(packages))]
    moves = []
    while True:
        where = {d: k for k, pkg in enumerate(packages) for d in pkg}
        candidates = sorted(d for d in where if d not in adjusted)
        if not candidates or K < 2:
            break
        d_star, delta0 = None, -np.inf
        for d in candidates:
            k = where[d]
            gain = valuator.value(k, [x for x in packages[k] if x != d]) - valuator.value(k, packages[k])
            if gain > delta0:
                d_star, delta0 = d, gain
        adjusted.add(d_star)
        origin = where[d_star]
        k_star, delta1 = None, -np.inf
        for k in range(K):
            if k == origin:
                continue
            gain = valuator.value(k, [*packages[k], d_star]) - valuator.value(k, packages[k])
            if gain > delta1:
                k_star, delta1 = k, gain
        if delta0 + delta1 > 0:
            packages[origin].remove(d_star)
            packages[k_star].append(d_star)
            moves.append((d_star, origin, k_star))
            history.append(sum(valuator.value(k, pkg) for k, pkg in enumerate(packages)))
        elif not restore_on_reject:
            break
    return _finish(packages, valuator, history, moves)


def allocate(
    gains,
    params: GameParams,
    valuator: Valuator | None = None,
    restore_on_reject: bool = False,
) -> Allocation:
    """Joint channel and power allocation: round one followed by round two."""
    valuator = valuator or Valuator(gains, params)
    first = round_one(gains, params, valuator)
    return round_two(first, gains, params, valuator, restore_on_reject)
