"""Exactly solvable chain MDP with a value-iteration oracle.

States 0..L-1 in a line, one-hot observations, actions {left, right}.
Acting from state s yields that state's table reward (plus optional
zero-mean noise); acting from the last state ends the episode. The true
Q-table is computable to any tolerance, which makes this the convergence
oracle for the Q-learning agents.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError
from .base import EnvSpec, EpisodeOver, StepResult


@dataclass
class ChainMdp:
    length: int = 5
    rewards: Optional[np.ndarray] = None  # default: 1 at the far end
    gamma: float = 0.9
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.length < 2:
            raise ConfigError("chain length must be >= 2")
        if self.rewards is None:
            self.rewards = np.zeros(self.length)
            self.rewards[-1] = 1.0
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        if self.rewards.shape != (self.length,):
            raise ConfigError("reward table length mismatch")


def _next_state(length: int, s: int, action: int) -> int:
    return min(s + 1, length - 1) if action == 1 else max(s - 1, 0)


def exact_q(mdp: ChainMdp, tolerance: float = 1e-10) -> np.ndarray:
    """Q*(s, a) by value iteration to the given sup-norm tolerance."""
    q = np.zeros((mdp.length, 2))
    while True:
        v = q.max(axis=1)
        new_q = np.empty_like(q)
        for s in range(mdp.length):
            for a in range(2):
                if s == mdp.length - 1:
                    new_q[s, a] = mdp.rewards[s]  # acting here ends the episode
                else:
                    new_q[s, a] = mdp.rewards[s] + mdp.gamma * v[_next_state(mdp.length, s, a)]
        if np.max(np.abs(new_q - q)) < tolerance:
            return new_q
        q = new_q


class ChainEnv:
    """Episodic wrapper around a ChainMdp with one-hot observations."""

    def __init__(self, length: int = 5, gamma: float = 0.9,
                 noise_sigma: float = 0.0, max_steps: int = 100,
                 rewards=None, seed=None):
        self.mdp = ChainMdp(length, None if rewards is None else np.asarray(rewards),
                            gamma, noise_sigma)
        self.spec = EnvSpec(state_dim=length, n_actions=2,
                            max_episode_steps=max_steps)
        self.rng = np.random.default_rng(seed)
        self._s = 0
        self._steps = 0
        self._ended = True

    def _obs(self) -> np.ndarray:
        obs = np.zeros(self.mdp.length)
        obs[self._s] = 1.0
        return obs

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self._s = 0
        self._steps = 0
        self._ended = False
        return self._obs()

    def step(self, action) -> StepResult:
        if self._ended:
            raise EpisodeOver("chain episode has ended")
        if action not in (0, 1):
            raise ConfigError(f"invalid chain action {action!r}")
        reward = float(self.mdp.rewards[self._s])
        if self.mdp.noise_sigma > 0:
            reward += self.mdp.noise_sigma * self.rng.standard_normal()
        done = self._s == self.mdp.length - 1
        if not done:
            self._s = _next_state(self.mdp.length, self._s, action)
        self._steps += 1
        truncated = not done and self._steps >= self.spec.max_episode_steps
        self._ended = done or truncated
        return StepResult(self._obs(), reward, done, truncated)
