"""Run configuration files (TOML).

Layout::

    experiment = "helix-rotation"     # required
    seed = 0                          # optional
    output_dir = "runs/helix"         # optional, overridden by --output-dir

    [params]        # nu, zeta, xi, c
    [grid]          # n_nodes, domain_length, dt, t_end, sample_every
    [tolerances]    # per-check overrides, names depend on the experiment
    [options]       # experiment-specific inputs

Every table is optional. Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigParse, UnknownExperiment
from .params import PhysicalParams

TOP_LEVEL_KEYS = {"experiment", "seed", "output_dir", "params", "grid", "tolerances", "options"}


@dataclass(frozen=True)
class GridConfig:
    """Discretisation. Unset entries fall back to the experiment's defaults."""

    n_nodes: int | None = None
    domain_length: float | None = None
    dt: float | None = None
    t_end: float | None = None
    sample_every: int | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None and not value > 0:
                raise ConfigParse(f"grid.{f.name} must be positive, got {value!r}")
        for name in ("n_nodes", "sample_every"):
            value = getattr(self, name)
            if value is not None and int(value) != value:
                raise ConfigParse(f"grid.{name} must be an integer")

    def merged(self, defaults: dict) -> dict:
        out = dict(defaults)
        out.update({f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None})
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: PhysicalParams = field(default_factory=PhysicalParams)
    grid: GridConfig = field(default_factory=GridConfig)
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output_dir: str | None = None
    seed: int = 0
    source: str | None = None


def _table(doc: dict, name: str) -> dict:
    value = doc.get(name, {})
    if not isinstance(value, dict):
        raise ConfigParse(f"[{name}] must be a table")
    return value


def _check_keys(where: str, given, allowed) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigParse(f"unknown key(s) in {where}: {', '.join(unknown)}; allowed: {', '.join(sorted(allowed))}")


def parse_config(doc: dict, source: str | None = None) -> ExperimentConfig:
    from .experiments import REGISTRY

    _check_keys("top level", doc, TOP_LEVEL_KEYS)
    name = doc.get("experiment")
    if not isinstance(name, str):
        raise ConfigParse("'experiment' must be given as a string")
    if name not in REGISTRY:
        raise UnknownExperiment(f"unknown experiment {name!r}; available: {', '.join(sorted(REGISTRY))}")
    spec = REGISTRY[name]

    raw_params = _table(doc, "params")
    _check_keys("[params]", raw_params, {f.name for f in fields(PhysicalParams)})
    raw_grid = _table(doc, "grid")
    _check_keys("[grid]", raw_grid, {f.name for f in fields(GridConfig)})
    tolerances = _table(doc, "tolerances")
    _check_keys("[tolerances]", tolerances, spec.tolerances)
    options = _table(doc, "options")
    _check_keys("[options]", options, spec.options)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigParse("'seed' must be an integer")
    out_dir = doc.get("output_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigParse("'output_dir' must be a string")
    for where, table in (("[params]", raw_params), ("[grid]", raw_grid), ("[tolerances]", tolerances)):
        for key, value in table.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigParse(f"{where} {key} must be a number")
    try:
        params = PhysicalParams(**{**PhysicalParams().to_dict(), **raw_params})
    except ValueError as exc:
        raise ConfigParse(str(exc)) from exc
    grid = GridConfig(**raw_grid)
    return ExperimentConfig(
        experiment=name,
        params=params,
        grid=grid,
        tolerances={k: float(v) for k, v in tolerances.items()},
        options=dict(options),
        output_dir=out_dir,
        seed=seed,
        source=source,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigParse(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"{path}: {exc}") from exc
    return parse_config(doc, source=str(path))


def schema() -> dict:
    """Machine-readable description of the config format and every experiment."""
    from .experiments import REGISTRY

    return {
        "top_level": {
            "experiment": "string, one of the experiment names",
            "seed": "integer (default 0)",
            "output_dir": "string (optional)",
        },
        "params": {f.name: f"float > 0 (default {f.default})" for f in fields(PhysicalParams)},
        "grid": {
            "n_nodes": "integer > 0",
            "domain_length": "float > 0",
            "dt": "float > 0",
            "t_end": "float > 0",
            "sample_every": "integer > 0 (steps between stored samples)",
        },
        "experiments": {
            name: {
                "description": spec.description,
                "grid_defaults": spec.grid,
                "options": spec.options,
                "tolerances": spec.tolerances,
            }
            for name, spec in sorted(REGISTRY.items())
        },
    }
