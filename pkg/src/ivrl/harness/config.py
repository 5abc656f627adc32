"""Declarative experiment configuration: YAML in, validated dataclasses out.

Unknown keys are rejected at every nesting level so that typos cannot
silently corrupt a sweep. The resolved (defaults-filled) form is written
back into every output directory.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import yaml

from ..agents import AgentVariant, TrainParams, get_variant
from ..agents.variants import VARIANTS
from ..envs import ENV_NAMES
from ..errors import ConfigError
from ..weighting import WeightScheme

# Hyperparameter defaults differ between the two families; these override
# the DQN-flavored TrainParams defaults when family == 'sac' (standard
# continuous-control settings).
SAC_TRAIN_DEFAULTS = {"lr": 3e-4, "tau": 5e-3, "hidden": (256, 256),
                      "batch_size": 256}

_VARIANT_KEYS = ("n_members", "critic_kind", "lam", "exploration",
                 "delta_rpf", "mask_prob", "ucb_lambda")
_WEIGHTING_KEYS = ("kind", "mebs_ratio", "fixed_xi", "temperature", "beta")
_TRAIN_KEYS = tuple(f.name for f in dataclasses.fields(TrainParams))
_RUN_KEYS = ("env_seeds", "net_seeds", "max_episodes", "max_env_steps",
             "stop_on_solve", "solve_threshold", "window")
_ENV_KEYS = ("name", "params")
_TOP_KEYS = ("agent", "train", "env", "run")


@dataclass
class ExperimentConfig:
    variant_name: str
    variant: AgentVariant
    train: TrainParams
    env_name: str
    env_params: dict
    env_seeds: List[int]
    net_seeds: List[int]
    max_episodes: int = 400
    max_env_steps: Optional[int] = None
    stop_on_solve: bool = False
    solve_threshold: Optional[float] = None
    window: int = 100

    def resolved_dict(self) -> dict:
        """Round-trippable fully-resolved form for the audit copy."""
        agent = {"variant": self.variant_name}
        for key in _VARIANT_KEYS:
            agent[key] = getattr(self.variant, key)
        agent["weighting"] = {k: getattr(self.variant.weighting, k)
                              for k in _WEIGHTING_KEYS}
        train = {k: getattr(self.train, k) for k in _TRAIN_KEYS}
        train["hidden"] = list(self.train.hidden)
        return {
            "agent": agent,
            "train": train,
            "env": {"name": self.env_name, "params": dict(self.env_params)},
            "run": {"env_seeds": list(self.env_seeds),
                    "net_seeds": list(self.net_seeds),
                    "max_episodes": self.max_episodes,
                    "max_env_steps": self.max_env_steps,
                    "stop_on_solve": self.stop_on_solve,
                    "solve_threshold": self.solve_threshold,
                    "window": self.window},
        }


def _require_mapping(obj, where: str) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(obj).__name__}")
    return obj


def _reject_unknown(mapping: dict, allowed, where: str):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}; "
                          f"allowed: {sorted(allowed)}")


def parse_config(raw: dict) -> ExperimentConfig:
    raw = _require_mapping(raw, "config")
    _reject_unknown(raw, _TOP_KEYS, "config")

    agent_cfg = _require_mapping(raw.get("agent"), "agent")
    _reject_unknown(agent_cfg, ("variant", "weighting") + _VARIANT_KEYS, "agent")
    name = agent_cfg.get("variant")
    if name is None:
        raise ConfigError("agent.variant is required")
    if name not in VARIANTS:
        raise ConfigError(f"agent.variant: unknown variant {name!r}; "
                          f"expected one of {sorted(VARIANTS)}")
    overrides = {k: agent_cfg[k] for k in _VARIANT_KEYS if k in agent_cfg}
    if "weighting" in agent_cfg:
        wcfg = _require_mapping(agent_cfg["weighting"], "agent.weighting")
        _reject_unknown(wcfg, _WEIGHTING_KEYS, "agent.weighting")
        base = VARIANTS[name].weighting
        merged = {k: wcfg.get(k, getattr(base, k)) for k in _WEIGHTING_KEYS}
        overrides["weighting"] = WeightScheme(**merged)
    try:
        variant = get_variant(name, **overrides)
    except TypeError as exc:
        raise ConfigError(f"agent: {exc}") from exc

    train_cfg = _require_mapping(raw.get("train"), "train")
    _reject_unknown(train_cfg, _TRAIN_KEYS, "train")
    train_values = dict(train_cfg)
    if variant.family == "sac":
        for key, val in SAC_TRAIN_DEFAULTS.items():
            train_values.setdefault(key, val)
    if "hidden" in train_values:
        hidden = train_values["hidden"]
        if not (isinstance(hidden, (list, tuple)) and hidden
                and all(isinstance(h, int) and h > 0 for h in hidden)):
            raise ConfigError("train.hidden: expected a list of positive ints")
        train_values["hidden"] = tuple(hidden)
    try:
        train = TrainParams(**train_values)
    except TypeError as exc:
        raise ConfigError(f"train: {exc}") from exc
    for key, positive in (("lr", True), ("batch_size", True), ("tau", True),
                          ("warmup", False), ("updates_per_step", True)):
        val = getattr(train, key)
        if positive and val <= 0 or val < 0:
            raise ConfigError(f"train.{key}: must be positive, got {val}")
    if not 0.0 < train.gamma <= 1.0:
        raise ConfigError(f"train.gamma: must be in (0, 1], got {train.gamma}")
    if not 0.0 < train.tau <= 1.0:
        raise ConfigError(f"train.tau: must be in (0, 1], got {train.tau}")

    env_cfg = _require_mapping(raw.get("env"), "env")
    _reject_unknown(env_cfg, _ENV_KEYS, "env")
    env_name = env_cfg.get("name")
    if env_name not in ENV_NAMES:
        raise ConfigError(f"env.name: unknown environment {env_name!r}; "
                          f"expected one of {ENV_NAMES}")
    env_params = _require_mapping(env_cfg.get("params"), "env.params")

    run_cfg = _require_mapping(raw.get("run"), "run")
    _reject_unknown(run_cfg, _RUN_KEYS, "run")
    env_seeds = run_cfg.get("env_seeds", [0])
    net_seeds = run_cfg.get("net_seeds", [0])
    for label, seeds in (("env_seeds", env_seeds), ("net_seeds", net_seeds)):
        if not (isinstance(seeds, list) and seeds
                and all(isinstance(s, int) for s in seeds)):
            raise ConfigError(f"run.{label}: expected a nonempty list of ints")
    max_episodes = run_cfg.get("max_episodes", 400)
    if not (isinstance(max_episodes, int) and max_episodes >= 1):
        raise ConfigError("run.max_episodes: expected a positive int")
    window = run_cfg.get("window", 100)
    if not (isinstance(window, int) and window >= 1):
        raise ConfigError("run.window: expected a positive int")

    return ExperimentConfig(
        variant_name=name,
        variant=variant,
        train=train,
        env_name=env_name,
        env_params=env_params,
        env_seeds=env_seeds,
        net_seeds=net_seeds,
        max_episodes=max_episodes,
        max_env_steps=run_cfg.get("max_env_steps"),
        stop_on_solve=bool(run_cfg.get("stop_on_solve", False)),
        solve_threshold=run_cfg.get("solve_threshold"),
        window=window,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return parse_config(raw)


def save_resolved(config: ExperimentConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(config.resolved_dict(), fh, sort_keys=False)
