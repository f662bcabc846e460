"""Non-cooperative power control among the UEs sharing one uplink channel.

Each player maximizes its expected data over the battery lifetime,
``u_i = B log2(1 + p_i alpha_i) * l(p_i)`` with a Peukert lifetime
``l(p) = C (V0 / (p + p0))**a``. The first-order condition reduces to the
root of

    f(p) = (p + p0) alpha / (1 + p alpha) - a ln(1 + p alpha),

which is strictly decreasing with ``f(0) = p0 alpha > 0``, so the best
response is ``min(root, p_bar)`` and the root is always bracketed on ``[0, hi]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SECONDS_PER_HOUR = 3600.0
REPORT_FLOOR = 1e-12  # W; smaller equilibrium powers are reported as 0
_EPS = float(np.finfo(float).eps)


class RootFindingError(RuntimeError):
    """The best-response root could not be bracketed or located."""


@dataclass(frozen=True)
class GameParams:
    """Battery, circuit and power-limit constants shared by every player.

    Powers in W, ``capacity`` in A*h, ``voltage`` in V.
    """

    p0: float = 0.05
    p_bar: float = 0.2
    a: float = 1.3
    capacity: float = 0.8
    voltage: float = 4.0
    epsilon: float = 1e-3
    max_iters: int = 1000

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError(f"Peukert exponent a must be > 1, got {self.a}")
        for name in ("p0", "p_bar", "capacity", "voltage", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class ChannelGame:
    """Players sharing one channel; player 0 is the cellular UE.

    ``cross_gain[j, i]`` is the gain from transmitter ``j`` to the receiver
    of player ``i`` (the eNB for ``i == 0``). The diagonal is ignored.
    """

    direct_gain: np.ndarray
    cross_gain: np.ndarray
    sigma2: float
    bandwidth: float = 180e3

    def __post_init__(self):
        direct = np.asarray(self.direct_gain, dtype=float).reshape(-1)
        cross = np.array(self.cross_gain, dtype=float).reshape(direct.size, direct.size)
        np.fill_diagonal(cross, 0.0)
        if direct.size < 1:
            raise ValueError("a channel game needs at least one player")
        if np.any(direct <= 0) or not self.sigma2 > 0:
            raise ValueError("direct gains and noise power must be positive")
        object.__setattr__(self, "direct_gain", direct)
        object.__setattr__(self, "cross_gain", cross)

    @property
    def num_players(self) -> int:
        return self.direct_gain.size

    @classmethod
    def from_package(cls, gains, channel: int, package) -> "ChannelGame":
        """Game for cellular UE ``channel`` plus the D2D pairs in ``package``."""
        members = list(package)
        n = 1 + len(members)
        direct = np.empty(n)
        direct[0] = gains.g_ke[channel]
        direct[1:] = gains.g_dd[members]
        cross = np.zeros((n, n))
        cross[1:, 0] = gains.g_de[members]
        cross[0, 1:] = gains.g_kd[channel, members]
        cross[1:, 1:] = gains.g_cross[np.ix_(members, members)]
        return cls(direct, cross, gains.sigma2, gains.bandwidth)

    def interference(self, power) -> np.ndarray:
        """Received interference ``I_i = sum_{j != i} p_j g_ji`` for every player."""
        return np.asarray(power, dtype=float) @ self.cross_gain

    def channel_qualities(self, power) -> np.ndarray:
        return self.direct_gain / (self.interference(power) + self.sigma2)


@dataclass
class EquilibriumResult:
    power: np.ndarray
    utilities: np.ndarray
    iterations: int
    converged: bool
    uniqueness_condition_holds: bool | None = None
    trajectory: list = field(default_factory=list, repr=False)

    @property
    def total_utility(self) -> float:
        return float(np.sum(self.utilities))


def channel_quality(game: ChannelGame, i: int, power) -> float:
    """Effective channel quality ``g_ii / (I_i + sigma^2)`` of player ``i``, in 1/W.

    ``power`` is a full power vector; entry ``i`` is ignored.
    """
    power = np.asarray(power, dtype=float)
    interference = float(power @ game.cross_gain[:, i])
    return float(game.direct_gain[i] / (interference + game.sigma2))


def rate(p, alpha, bandwidth):
    """Shannon rate in bit/s."""
    return bandwidth * np.log2(1.0 + np.asarray(p) * alpha)


def lifetime(p, params: GameParams):
    """Peukert battery lifetime in seconds at transmit power ``p``."""
    current = (np.asarray(p) + params.p0) / params.voltage
    return SECONDS_PER_HOUR * params.capacity / current**params.a


def utility(p, alpha, params: GameParams, bandwidth):
    """Expected data (bits) sent over the battery lifetime."""
    return rate(p, alpha, bandwidth) * lifetime(p, params)


def f_value(p, alpha, params: GameParams):
    """Scaled derivative of the utility in ``p``; its root is the unconstrained optimum."""
    x = np.asarray(p) * alpha
    return (np.asarray(p) + params.p0) * alpha / (1.0 + x) - params.a * np.log1p(x)


def _f(p: float, alpha: float, p0: float, a: float) -> float:
    x = p * alpha
    return (p + p0) * alpha / (1.0 + x) - a * math.log1p(x)


def bisect_decreasing(func, lo: float, hi: float, maxiter: int = 400) -> float:
    """Root of a decreasing function on ``[lo, hi]`` with ``func(lo) > 0 > func(hi)``.

    Halves the bracket until it can no longer shrink in floating point.
    """
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        fm = func(mid)
        if fm > 0.0:
            lo = mid
        elif fm < 0.0:
            hi = mid
        else:
            return mid
    raise RootFindingError(f"bisection did not converge in {maxiter} steps on [{lo}, {hi}]")


def _df(p: float, alpha: float, p0: float, a: float) -> float:
    x = p * alpha
    return alpha * (1.0 - p0 * alpha - a * (1.0 + x)) / (1.0 + x) ** 2


def _bracketed_newton(alpha: float, p0: float, a: float, lo: float, hi: float, maxiter: int = 400) -> float:
    """Root of ``f`` in ``[lo, hi]``: Newton steps, bisection when a step leaves the bracket."""
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = _f(x, alpha, p0, a)
        if fx > 0.0:
            lo = x
        elif fx < 0.0:
            hi = x
        else:
            return x
        step = fx / _df(x, alpha, p0, a)
        new = x - step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
            if new <= lo or new >= hi:
                return x
        if abs(new - x) <= 4.0 * _EPS * new:
            return new
        x = new
    raise RootFindingError(f"root search did not converge for alpha={alpha}")


def optimal_power(alpha: float, params: GameParams, cap: float | None = None) -> float:
    """Unconstrained utility maximizer (root of ``f``).

    The root is bracketed on ``[0, hi]`` with ``hi`` doubled from ``p_bar``
    until ``f(hi) < 0``. With ``cap`` given, returns ``cap`` as soon as
    ``f(cap) >= 0`` since the root then lies at or beyond the cap.
    """
    alpha = float(alpha)
    p0, a = params.p0, params.a
    if not alpha > 0:
        raise ValueError(f"channel quality must be positive, got {alpha}")
    hi = params.p_bar if cap is None else cap
    if cap is not None and _f(cap, alpha, p0, a) >= 0.0:
        return cap
    for _ in range(2000):
        if _f(hi, alpha, p0, a) < 0.0:
            break
        hi *= 2.0
    else:
        raise RootFindingError(f"could not bracket the root for alpha={alpha}")
    return _bracketed_newton(alpha, p0, a, 0.0, hi)


def best_response_alpha(alpha: float, params: GameParams) -> float:
    return optimal_power(alpha, params, cap=params.p_bar)


def best_response(game: ChannelGame, i: int, power, params: GameParams) -> float:
    """Best response ``min(p_tilde, p_bar)`` of player ``i`` to the other powers."""
    return best_response_alpha(channel_quality(game, i, power), params)


def player_utilities(game: ChannelGame, power, params: GameParams) -> np.ndarray:
    power = np.asarray(power, dtype=float)
    return utility(power, game.channel_qualities(power), params, game.bandwidth)


def uniqueness_check(result: EquilibriumResult, game: ChannelGame, params: GameParams) -> bool:
    """Sufficient condition ``p0 p_tilde_i + (I_i - sigma^2) / g_ii > 0`` for every player."""
    interference = game.interference(result.power)
    alphas = game.direct_gain / (interference + game.sigma2)
    for i in range(game.num_players):
        p_tilde = optimal_power(alphas[i], params)
        if not params.p0 * p_tilde + (interference[i] - game.sigma2) / game.direct_gain[i] > 0:
            return False
    return True


def solve_equilibrium(game: ChannelGame, params: GameParams) -> EquilibriumResult:
    """Synchronous best-response iteration from the all-zero power vector.

    Stops when every component moves by less than ``epsilon``; after
    ``max_iters`` sweeps the result is returned flagged as not converged.
    """
    n = game.num_players
    direct = game.direct_gain
    cross = game.cross_gain
    sigma2 = game.sigma2
    power = np.zeros(n)
    trajectory = [power]
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iters + 1):
        alphas = direct / (power @ cross + sigma2)
        new = np.array([best_response_alpha(alpha, params) for alpha in alphas])
        trajectory.append(new)
        step = np.max(np.abs(new - power))
        power = new
        if step < params.epsilon:
            converged = True
            break
    reported = np.where(power < REPORT_FLOOR, 0.0, power)
    result = EquilibriumResult(
        power=reported,
        utilities=player_utilities(game, reported, params),
        iterations=iterations,
        converged=converged,
        trajectory=trajectory,
    )
    result.uniqueness_condition_holds = uniqueness_check(result, game, params)
    return result


def fixed_power_result(game: ChannelGame, params: GameParams, power: float) -> EquilibriumResult:
    """Every player transmits ``power``; no game is played."""
    if not 0 < power <= params.p_bar:
        raise ValueError(f"fixed power must lie in (0, p_bar], got {power}")
    vector = np.full(game.num_players, float(power))
    return EquilibriumResult(
        power=vector,
        utilities=player_utilities(game, vector, params),
        iterations=0,
        converged=True,
        trajectory=[vector],
    )
