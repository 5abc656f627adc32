"""Environment interface types."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment's interface and solve bar."""

    state_dim: int
    n_actions: Optional[int] = None          # discrete action count
    action_low: Optional[np.ndarray] = None  # continuous box bounds
    action_high: Optional[np.ndarray] = None
    max_episode_steps: int = 1000
    solve_threshold: Optional[float] = None

    @property
    def discrete(self) -> bool:
        return self.n_actions is not None

    @property
    def action_dim(self) -> int:
        if self.discrete:
            raise ConfigError("discrete action space has no action_dim")
        return self.action_low.shape[0]


@dataclass
class StepResult:
    """One transition: done marks true termination, truncated the time cap."""

    state: np.ndarray
    reward: float
    done: bool
    truncated: bool


class EpisodeOver(ConfigError):
    """step() called after the episode ended; reset() is required first."""
