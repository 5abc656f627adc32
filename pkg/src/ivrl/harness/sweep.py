"""Grid sweeps: cross-product expansion of dotted config overrides."""

import copy
import itertools
import re
from pathlib import Path
from typing import Dict, List

import yaml

from ..errors import ConfigError
from .config import ExperimentConfig, parse_config
from .runner import run_experiment


def load_grid(path) -> Dict[str, list]:
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("grid: expected a mapping of dotted keys to lists")
    for key, vals in raw.items():
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"grid.{key}: expected a nonempty list of values")
    return raw


def _set_path(cfg: dict, dotted: str, value):
    parts = dotted.split(".")
    node = cfg
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            node[part] = {} if isinstance(node, dict) else None
        if not isinstance(node, dict):
            raise ConfigError(f"grid key {dotted!r}: {part} is not a mapping")
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def _slug(key: str, value) -> str:
    text = f"{key.split('.')[-1]}={value}"
    return re.sub(r"[^A-Za-z0-9_.=-]", "-", text)


def expand_grid(base_raw: dict, grid: Dict[str, list]):
    """Yield (subdir name, parsed config) per grid point; the base config
    alone when the grid is empty. Every point re-validates, so unknown
    keys are rejected up front."""
    if not grid:
        yield "base", parse_config(copy.deepcopy(base_raw))
        return
    keys = sorted(grid)
    for idx, combo in enumerate(itertools.product(*(grid[k] for k in keys))):
        raw = copy.deepcopy(base_raw)
        for key, value in zip(keys, combo):
            _set_path(raw, key, value)
        name = f"point{idx:03d}_" + "_".join(_slug(k, v)
                                             for k, v in zip(keys, combo))
        yield name, parse_config(raw)


def run_sweep(base_raw: dict, grid: Dict[str, list], out_dir,
              workers: int = 1) -> List[Path]:
    """One run_experiment per grid point, each in its own subdirectory."""
    out_dir = Path(out_dir)
    points = list(expand_grid(base_raw, grid))  # validate all before running
    produced = []
    for name, config in points:
        sub = out_dir / name
        run_experiment(config, sub, workers=workers)
        produced.append(sub)
    return produced
