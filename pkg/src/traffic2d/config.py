"""Experiment configs: one JSON document per run, schema-checked up front.

Unknown keys are rejected; defaults are filled in so reports can embed the
fully resolved config for reproducibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

_REQUIRED = object()


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    types: tuple
    default: object = _REQUIRED
    choices: tuple | None = None
    schema: dict | None = None


def _check(value, key: Key, path: str):
    if value is None and type(None) in key.types:
        return None
    if key.types == (float,) and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, tuple(t for t in key.types if t is not type(None))):
        names = "/".join(t.__name__ for t in key.types)
        raise ConfigError(f"{path}: expected {names}, got {type(value).__name__}")
    if key.choices is not None and value not in key.choices:
        raise ConfigError(f"{path}: {value!r} not in {key.choices}")
    if key.schema is not None and isinstance(value, dict):
        return resolve(value, key.schema, path)
    return value


def resolve(config: dict, schema: dict, path: str = "config") -> dict:
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(config) - set(schema)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    out = {}
    for name, key in schema.items():
        if name in config:
            out[name] = _check(config[name], key, f"{path}.{name}")
        elif key.default is _REQUIRED:
            raise ConfigError(f"{path}.{name} is required")
        else:
            out[name] = key.default
    return out


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


GRID_SCHEMA = {
    "lx": Key((float,)),
    "ly": Key((float,)),
    "nx": Key((int,)),
    "ny": Key((int,)),
    "x0": Key((float,), default=0.0),
    "y0": Key((float,), default=0.0),
}

PARAMS_SCHEMA = {
    "variant": Key((str,), choices=("shared", "length_weighted", "per_class_shared_max")),
    "c_x": Key((float, type(None)), default=None),
    "c_y": Key((float, type(None)), default=None),
    "c_x_rho": Key((float, type(None)), default=None),
    "c_y_rho": Key((float, type(None)), default=None),
    "c_x_mu": Key((float, type(None)), default=None),
    "c_y_mu": Key((float, type(None)), default=None),
    "r_max": Key((float,)),
}

RIEMANN_VALIDATE_SCHEMA = {
    "case": Key((str, type(None)), default=None,
                choices=("no_shocks", "no_rarefactions", "one_shock",
                         "one_rarefaction", "two_shocks_two_rarefactions", None)),
    "rho_quadrants": Key((list, type(None)), default=None),
    "n_cells": Key((int,), default=500),
    "cfl_safety": Key((float,), default=0.9),
    "jump_fraction": Key((float,), default=0.125),
    "tol_cells": Key((float,), default=3.0),
    "write_snapshots": Key((bool,), default=True),
}

SIMULATE_SCHEMA = {
    "scenario": Key((str, type(None)), default=None,
                    choices=("overtake", "camera_standin", None)),
    "grid": Key((dict, type(None)), default=None, schema=GRID_SCHEMA),
    "params": Key((dict, type(None)), default=None, schema=PARAMS_SCHEMA),
    "initial_csv": Key((str, type(None)), default=None),
    "reference_csv": Key((str, type(None)), default=None),
    "t_final": Key((float, type(None)), default=None),
    "snapshot_dt": Key((float, type(None)), default=None),
    "cfl_safety": Key((float,), default=0.9),
    "bc": Key((str,), default="outflow", choices=("outflow", "periodic")),
    "error_dt": Key((float,), default=0.5),
}

CALIBRATE_SCHEMA = {
    "trajectories": Key((str,)),
    "format": Key((str,), default="csv"),
    "variant": Key((str,), default="shared", choices=("shared", "per_class")),
    "lx_m": Key((float,)),
    "dt_s": Key((float,), default=1.0),
    "kappa": Key((int,), default=60),
    "rmax": Key((float, type(None)), default=None),
    "rmax_geometry": Key((dict, type(None)), default=None, schema={
        "lanes": Key((int,)),
        "effective_length_m": Key((float,)),
    }),
    "bounds": Key((dict, type(None)), default=None, schema={
        "c_x": Key((list, type(None)), default=None),
        "c_y": Key((list, type(None)), default=None),
    }),
}

MULTILANE_SCHEMA = {
    "scenario": Key((str, type(None)), default="overtake_multilane",
                    choices=("overtake_multilane", None)),
    "lane_change_rate": Key((float,), default=1.0),
    "t_final": Key((float,), default=4.0),
    "snapshot_dt": Key((float, type(None)), default=1.0),
    "cfl_safety": Key((float,), default=0.9),
    "bc": Key((str,), default="outflow", choices=("outflow", "periodic")),
}
