"""Command-line entry point: TOML config in, CSV or JSON sweep table out.

Config sections (all keys optional, defaults shown by --dry-run)::

    [cell]    cell_radius, num_cellular, num_d2d, max_d2d_distance | max_d2d_distance_ratio,
              bandwidth, noise_psd, rng_seed
    [game]    p0, p_bar, a, capacity, voltage, epsilon, max_iters, fixed_power
    [sweep]   param, values, realizations, algorithms, pair_gain, restore_on_reject
    [output]  path, format

The environment variable ``D2D_AUCTION_SEED`` overrides the default seed
when neither the file nor ``--seed`` sets one.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, replace

import tomli_w

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .baselines import ALGORITHMS
from .channel_model import CellConfig
from .metrics import COLUMNS, SWEEP_PARAMS, SweepSpec, run_sweep
from .power_game import GameParams

SEED_ENV = "D2D_AUCTION_SEED"
MAX_DISTANCE_RATIO = 1.0
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Base class for config problems."""


class ConfigParseError(ConfigError):
    """The document is not valid TOML."""


class UnknownKeyError(ConfigError):
    """A section or key outside the documented schema."""


class ConstraintError(ConfigError):
    """A value has the wrong type or violates a parameter constraint."""


SCHEMA = {
    "cell": {
        "cell_radius": float,
        "num_cellular": int,
        "num_d2d": int,
        "max_d2d_distance": float,
        "max_d2d_distance_ratio": float,
        "bandwidth": float,
        "noise_psd": float,
        "rng_seed": int,
    },
    "game": {
        "p0": float,
        "p_bar": float,
        "a": float,
        "capacity": float,
        "voltage": float,
        "epsilon": float,
        "max_iters": int,
        "fixed_power": float,
    },
    "sweep": {
        "param": str,
        "values": list,
        "realizations": int,
        "algorithms": list,
        "pair_gain": str,
        "restore_on_reject": bool,
    },
    "output": {"path": str, "format": str},
}


@dataclass(frozen=True)
class RunConfig:
    cell: CellConfig = CellConfig()
    game: GameParams = GameParams()
    fixed_power: float = 0.05
    sweep_param: str = "num_d2d"
    sweep_values: tuple = ()
    realizations: int = 1000
    algorithms: tuple = ALGORITHMS
    pair_gain: str = "g_de"
    restore_on_reject: bool = False
    output_path: str = "results.csv"
    output_format: str = "csv"

    def sweep_spec(self) -> SweepSpec:
        values = self.sweep_values or (_base_value(self.cell, self.sweep_param),)
        return SweepSpec(
            param=self.sweep_param,
            values=tuple(values),
            realizations=self.realizations,
            cell=self.cell,
            game=self.game,
            algorithms=tuple(self.algorithms),
            fixed_power=self.fixed_power,
            pair_gain=self.pair_gain,
            restore_on_reject=self.restore_on_reject,
        )


def _base_value(cell: CellConfig, param: str):
    if param == "num_d2d":
        return cell.num_d2d
    if param == "num_channels":
        return cell.num_cellular
    return cell.max_d2d_distance / cell.cell_radius


def _check_type(section: str, key: str, value, expected):
    where = f"[{section}] {key}"
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConstraintError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConstraintError(f"{where}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, expected):
        raise ConstraintError(f"{where}: expected {expected.__name__}, got {value!r}")
    return value


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return CellConfig.rng_seed
    try:
        return int(env)
    except ValueError:
        raise ConstraintError(f"{SEED_ENV}: expected an integer, got {env!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML document; omitted keys take their defaults."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"invalid TOML: {exc}") from None

    sections = {}
    for name, body in doc.items():
        if name not in SCHEMA:
            raise UnknownKeyError(f"unknown section [{name}]; expected one of {sorted(SCHEMA)}")
        if not isinstance(body, dict):
            raise UnknownKeyError(f"top-level key {name!r} must be a [section]")
        checked = {}
        for key, value in body.items():
            if key not in SCHEMA[name]:
                raise UnknownKeyError(f"unknown key [{name}] {key}")
            checked[key] = _check_type(name, key, value, SCHEMA[name][key])
        sections[name] = checked
    cell_kw = dict(sections.get("cell", {}))
    game_kw = dict(sections.get("game", {}))
    sweep_kw = dict(sections.get("sweep", {}))
    out_kw = dict(sections.get("output", {}))

    ratio = cell_kw.pop("max_d2d_distance_ratio", None)
    if ratio is not None:
        if "max_d2d_distance" in cell_kw:
            raise ConstraintError("[cell] give max_d2d_distance or max_d2d_distance_ratio, not both")
        if not 0 < ratio <= MAX_DISTANCE_RATIO:
            raise ConstraintError(
                f"[cell] max_d2d_distance_ratio must lie in (0, {MAX_DISTANCE_RATIO}], got {ratio}"
            )
        radius = cell_kw.get("cell_radius", CellConfig.cell_radius)
        cell_kw["max_d2d_distance"] = ratio * radius
    cell_kw.setdefault("rng_seed", _default_seed())
    fixed_power = game_kw.pop("fixed_power", RunConfig.fixed_power)
    try:
        cell = CellConfig(**cell_kw)
    except ValueError as exc:
        raise ConstraintError(f"[cell] {exc}") from None
    try:
        game = GameParams(**game_kw)
    except ValueError as exc:
        raise ConstraintError(f"[game] {exc}") from None
    if not 0 < fixed_power <= game.p_bar:
        raise ConstraintError(f"[game] fixed_power must lie in (0, p_bar], got {fixed_power}")

    param = sweep_kw.get("param", RunConfig.sweep_param)
    if param not in SWEEP_PARAMS:
        raise ConstraintError(f"[sweep] param must be one of {SWEEP_PARAMS}, got {param!r}")
    values = sweep_kw.get("values", [])
    numeric = float if param == "max_d2d_distance_ratio" else int
    values = tuple(_check_type("sweep", "values", v, numeric) for v in values)
    algorithms = tuple(sweep_kw.get("algorithms", ALGORITHMS))
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ConstraintError(f"[sweep] algorithms: unknown {name!r}; choose from {ALGORITHMS}")
    if not algorithms:
        raise ConstraintError("[sweep] algorithms must not be empty")
    pair_gain = sweep_kw.get("pair_gain", RunConfig.pair_gain)
    if pair_gain not in ("g_de", "g_dd"):
        raise ConstraintError(f"[sweep] pair_gain must be 'g_de' or 'g_dd', got {pair_gain!r}")
    fmt = out_kw.get("format", RunConfig.output_format)
    if fmt not in FORMATS:
        raise ConstraintError(f"[output] format must be one of {FORMATS}, got {fmt!r}")

    config = RunConfig(
        cell=cell,
        game=game,
        fixed_power=fixed_power,
        sweep_param=param,
        sweep_values=values,
        realizations=sweep_kw.get("realizations", RunConfig.realizations),
        algorithms=algorithms,
        pair_gain=pair_gain,
        restore_on_reject=sweep_kw.get("restore_on_reject", False),
        output_path=out_kw.get("path", RunConfig.output_path),
        output_format=fmt,
    )
    validate(config)
    return config


def validate(config: RunConfig) -> None:
    """Re-check the cross-field constraints enforced when the sweep is built."""
    try:
        config.sweep_spec()
    except ValueError as exc:
        raise ConstraintError(f"[sweep] {exc}") from None


def serialize_config(config: RunConfig) -> str:
    doc = {
        "cell": asdict(config.cell),
        "game": {**asdict(config.game), "fixed_power": config.fixed_power},
        "sweep": {
            "param": config.sweep_param,
            "values": list(config.sweep_values),
            "realizations": config.realizations,
            "algorithms": list(config.algorithms),
            "pair_gain": config.pair_gain,
            "restore_on_reject": config.restore_on_reject,
        },
        "output": {"path": config.output_path, "format": config.output_format},
    }
    return tomli_w.dumps(doc)


def _fmt(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "null"
        return f"{value:.12g}"
    return str(value)


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    return buf.getvalue()


def _round(value):
    if isinstance(value, float) and not isinstance(value, bool):
        return None if math.isnan(value) else float(f"{value:.12g}")
    return value


def format_json(rows) -> str:
    table = [{c: _round(row[c]) for c in COLUMNS} for row in rows]
    return json.dumps({"columns": list(COLUMNS), "rows": table}, indent=2) + "\n"


def run(config: RunConfig, jobs: int | None = None) -> list[dict]:
    """Run the configured sweep and write the output table."""
    rows = run_sweep(config.sweep_spec(), jobs=jobs)
    text = format_csv(rows) if config.output_format == "csv" else format_json(rows)
    with open(config.output_path, "w", newline="") as fh:
        fh.write(text)
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2d-auction",
        description="Monte Carlo sweeps of D2D channel and power allocation.",
    )
    parser.add_argument("--config", help="TOML config file (built-in defaults when omitted)")
    parser.add_argument(
        "--algorithm",
        action="append",
        choices=ALGORITHMS,
        help="algorithm to run; repeat for several (overrides the config)",
    )
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--realizations", type=int, help="realizations per sweep point")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    parser.add_argument("--dry-run", action="store_true", help="validate and print the resolved config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        config = parse_config(text)
        overrides = {}
        if args.algorithm:
            overrides["algorithms"] = tuple(dict.fromkeys(args.algorithm))
        if args.seed is not None:
            overrides["cell"] = replace(config.cell, rng_seed=args.seed)
        if args.realizations is not None:
            overrides["realizations"] = args.realizations
        if args.out:
            overrides["output_path"] = args.out
        if overrides:
            config = replace(config, **overrides)
            validate(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2

    if args.dry_run:
        sys.stdout.write(serialize_config(config))
        return 0
    try:
        rows = run(config, jobs=args.jobs)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    nonconverged = sum(r["nonconverged"] for r in rows)
    print(f"wrote {len(rows)} rows to {config.output_path} ({nonconverged} non-converged games)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
