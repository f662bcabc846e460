"""Per-realization metrics and Monte Carlo parameter sweeps."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .baselines import ALGORITHMS, run_algorithm
from .channel_model import CellConfig, realize
from .power_game import SECONDS_PER_HOUR, ChannelGame, GameParams, lifetime, rate, utility

SWEEP_PARAMS = ("num_d2d", "num_channels", "max_d2d_distance_ratio")


@dataclass
class MetricsRecord:
    """System and per-class statistics of one allocated realization.

    Class averages are ``nan`` when the class is empty (no D2D pairs).
    """

    sum_rate: float
    system_tx_power: float
    system_total_power: float
    cell_expected_data: float
    d2d_expected_data: float
    cell_rate: float
    d2d_rate: float
    cell_lifetime_h: float
    d2d_lifetime_h: float
    mean_pg_iters: float
    eq_solves: float
    nonconverged: float
    uniqueness_rate: float
    cell_rates: np.ndarray = field(default=None, repr=False)
    d2d_rates: np.ndarray = field(default=None, repr=False)
    cell_data: np.ndarray = field(default=None, repr=False)
    d2d_data: np.ndarray = field(default=None, repr=False)

    def scalars(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name in SCALAR_FIELDS}


SCALAR_FIELDS = (
    "sum_rate",
    "system_tx_power",
    "system_total_power",
    "cell_expected_data",
    "d2d_expected_data",
    "cell_rate",
    "d2d_rate",
    "cell_lifetime_h",
    "d2d_lifetime_h",
    "mean_pg_iters",
    "eq_solves",
    "nonconverged",
    "uniqueness_rate",
)


METRIC_COLUMNS = (
    ("sum_rate", "sum_rate_bps"),
    ("system_tx_power", "system_tx_power_w"),
    ("system_total_power", "system_total_power_w"),
    ("cell_expected_data", "cell_expected_data_bits"),
    ("d2d_expected_data", "d2d_expected_data_bits"),
    ("cell_rate", "cell_rate_bps"),
    ("d2d_rate", "d2d_rate_bps"),
    ("cell_lifetime_h", "cell_lifetime_h"),
    ("d2d_lifetime_h", "d2d_lifetime_h"),
)
DIAGNOSTIC_COLUMNS = ("mean_pg_iters", "eq_solves", "nonconverged", "uniqueness_rate")
COLUMNS = (
    ("sweep_param", "param_value", "algorithm", "realizations")
    + tuple(c for _, c in METRIC_COLUMNS)
    + tuple(c + "_stderr" for _, c in METRIC_COLUMNS)
    + DIAGNOSTIC_COLUMNS
)


def _mean(values) -> float:
    return float(np.mean(values)) if len(values) else math.nan


def evaluate(allocation, gains, params: GameParams) -> MetricsRecord:
    """Rates, lifetimes and expected data of every UE at the allocated powers."""
    K, D = gains.num_cellular, gains.num_d2d
    cell_power, d2d_power = np.zeros(K), np.zeros(D)
    cell_alpha, d2d_alpha = np.zeros(K), np.zeros(D)
    for k, (package, eq) in enumerate(zip(allocation.packages, allocation.equilibria)):
        game = ChannelGame.from_package(gains, k, package)
        alphas = game.channel_qualities(eq.power)
        cell_power[k], cell_alpha[k] = eq.power[0], alphas[0]
        d2d_power[package] = eq.power[1:]
        d2d_alpha[package] = alphas[1:]

    B = gains.bandwidth
    cell_rates, d2d_rates = rate(cell_power, cell_alpha, B), rate(d2d_power, d2d_alpha, B)
    cell_life = lifetime(cell_power, params) / SECONDS_PER_HOUR
    d2d_life = lifetime(d2d_power, params) / SECONDS_PER_HOUR
    cell_data = utility(cell_power, cell_alpha, params, B)
    d2d_data = utility(d2d_power, d2d_alpha, params, B)
    tx_power = float(cell_power.sum() + d2d_power.sum())
    eqs = allocation.equilibria
    return MetricsRecord(
        sum_rate=float(cell_rates.sum() + d2d_rates.sum()),
        system_tx_power=tx_power,
        system_total_power=tx_power + (K + D) * params.p0,
        cell_expected_data=_mean(cell_data),
        d2d_expected_data=_mean(d2d_data),
        cell_rate=_mean(cell_rates),
        d2d_rate=_mean(d2d_rates),
        cell_lifetime_h=_mean(cell_life),
        d2d_lifetime_h=_mean(d2d_life),
        mean_pg_iters=_mean([eq.iterations for eq in eqs]),
        eq_solves=float(allocation.solves),
        nonconverged=float(allocation.nonconverged),
        uniqueness_rate=_mean([1.0 if eq.uniqueness_condition_holds else 0.0 for eq in eqs]),
        cell_rates=cell_rates,
        d2d_rates=d2d_rates,
        cell_data=cell_data,
        d2d_data=d2d_data,
    )


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter Monte Carlo sweep.

    ``param`` is one of ``num_d2d``, ``num_channels`` (cellular UEs and
    channels move together) or ``max_d2d_distance_ratio`` (fraction of the
    cell radius).
    """

    param: str = "num_d2d"
    values: tuple = (6,)
    realizations: int = 1000
    cell: CellConfig = CellConfig()
    game: GameParams = GameParams()
    algorithms: tuple = ALGORITHMS
    fixed_power: float = 0.05
    pair_gain: str = "g_de"
    restore_on_reject: bool = False

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"sweep param must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
        for value in self.values:
            self.point_config(value)

    def point_config(self, value) -> CellConfig:
        if self.param == "num_d2d":
            return replace(self.cell, num_d2d=int(value))
        if self.param == "num_channels":
            return replace(self.cell, num_cellular=int(value))
        if not 0 < value <= 1.0:
            raise ValueError(f"max_d2d_distance_ratio must lie in (0, 1], got {value}")
        return replace(self.cell, max_d2d_distance=float(value) * self.cell.cell_radius)


def realization_rng(base_seed: int, point_index: int, realization_index: int) -> np.random.Generator:
    """Independent stream per (point, realization), shared by every algorithm."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, point_index, realization_index]))


def run_realization(spec: SweepSpec, point_index: int, realization_index: int) -> dict[str, MetricsRecord]:
    config = spec.point_config(spec.values[point_index])
    rng = realization_rng(config.rng_seed, point_index, realization_index)
    _, gains = realize(config, rng)
    out = {}
    for name in spec.algorithms:
        allocation = run_algorithm(
            name,
            gains,
            spec.game,
            fixed_power=spec.fixed_power,
            pair_gain=spec.pair_gain,
            restore_on_reject=spec.restore_on_reject,
        )
        out[name] = evaluate(allocation, gains, spec.game)
    return out


def _task(args):
    spec, point_index, realization_index = args
    result = run_realization(spec, point_index, realization_index)
    return {name: [rec.scalars()[f] for f in SCALAR_FIELDS] for name, rec in result.items()}


def _summarize(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # one contiguous row per metric, so numpy reduces each with pairwise summation
    columns = np.ascontiguousarray(samples.T)
    n = samples.shape[0]
    mean = np.mean(columns, axis=1)
    if n < 2:
        return mean, np.full(mean.shape, math.nan)
    stderr = np.std(columns, axis=1, ddof=1) / math.sqrt(n)
    return mean, stderr


def run_sweep(spec: SweepSpec, jobs: int | None = None) -> list[dict]:
    """Average metrics for every (parameter value, algorithm).

    Every algorithm sees the same gain tables. Output does not depend on
    ``jobs``: results are collected in realization order before reducing.
    """
    jobs = jobs or os.cpu_count() or 1
    tasks = [(spec, p, r) for p in range(len(spec.values)) for r in range(spec.realizations)]
    if jobs == 1:
        results = list(map(_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))

    rows = []
    nonconv = SCALAR_FIELDS.index("nonconverged")
    for p, value in enumerate(spec.values):
        chunk = results[p * spec.realizations : (p + 1) * spec.realizations]
        for name in spec.algorithms:
            samples = np.array([r[name] for r in chunk], dtype=float)
            mean, stderr = _summarize(samples)
            by_field = dict(zip(SCALAR_FIELDS, mean))
            err_by_field = dict(zip(SCALAR_FIELDS, stderr))
            row = {"sweep_param": spec.param, "param_value": value, "algorithm": name, "realizations": spec.realizations}
            for f, column in METRIC_COLUMNS:
                row[column] = _nan_to_none(by_field[f])
            for f, column in METRIC_COLUMNS:
                row[column + "_stderr"] = _nan_to_none(err_by_field[f])
            row["mean_pg_iters"] = _nan_to_none(by_field["mean_pg_iters"])
            row["eq_solves"] = _nan_to_none(by_field["eq_solves"])
            row["nonconverged"] = int(samples[:, nonconv].sum())
            row["uniqueness_rate"] = _nan_to_none(by_field["uniqueness_rate"])
            rows.append(row)
    rows.sort(key=lambda r: (r["param_value"], r["algorithm"]))
    return rows


def _nan_to_none(x):
    x = float(x)
    return None if math.isnan(x) else x
