from ..errors import ConfigError
from .base import EnvSpec, EpisodeOver, StepResult
from .cartpole import CartPoleNoise
from .chain import ChainEnv, ChainMdp, exact_q
from .mountain_car import MountainCar
from .pendulum import Pendulum

ENV_NAMES = ("cartpole-noise", "mountain-car", "pendulum", "chain")


def make_env(name: str, **params):
    """Build an environment by registry name."""
    if name == "cartpole-noise":
        return CartPoleNoise(**params)
    if name == "mountain-car":
        return MountainCar(**params)
    if name == "pendulum":
        return Pendulum(**params)
    if name == "chain":
        return ChainEnv(**params)
    raise ConfigError(f"unknown environment {name!r}; expected one of {ENV_NAMES}")


__all__ = ["EnvSpec", "EpisodeOver", "StepResult", "CartPoleNoise", "ChainEnv",
           "ChainMdp", "exact_q", "MountainCar", "Pendulum", "make_env",
           "ENV_NAMES"]
