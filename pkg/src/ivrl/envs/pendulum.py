"""Pendulum swing-up: continuous torque control, quadratic state cost.

Never terminates; episodes end only by truncation at the step cap.
Optional Gaussian reward noise makes the supervision signal noisy while
leaving the physics untouched.
"""

import math

import numpy as np

from ..errors import ConfigError
from .base import EnvSpec, EpisodeOver, StepResult

MAX_SPEED = 8.0
MAX_TORQUE = 2.0
DT = 0.05
GRAVITY = 10.0
MASS = 1.0
LENGTH = 1.0


def _angle_normalize(x: float) -> float:
    return ((x + math.pi) % (2 * math.pi)) - math.pi


class Pendulum:
    def __init__(self, max_steps: int = 200, noise_sigma: float = 0.0,
                 seed=None):
        if noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        self.noise_sigma = noise_sigma
        self.spec = EnvSpec(state_dim=3,
                            action_low=np.array([-MAX_TORQUE]),
                            action_high=np.array([MAX_TORQUE]),
                            max_episode_steps=max_steps)
        self.rng = np.random.default_rng(seed)
        self._theta = 0.0
        self._theta_dot = 0.0
        self._steps = 0
        self._ended = True

    def _obs(self) -> np.ndarray:
        return np.array([math.cos(self._theta), math.sin(self._theta),
                         self._theta_dot])

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self._theta = self.rng.uniform(-math.pi, math.pi)
        self._theta_dot = self.rng.uniform(-1.0, 1.0)
        self._steps = 0
        self._ended = False
        return self._obs()

    def step(self, action) -> StepResult:
        if self._ended:
            raise EpisodeOver("pendulum episode has ended")
        u = np.asarray(action, dtype=np.float64).reshape(-1)
        if u.shape != (1,):
            raise ConfigError(f"pendulum expects a 1-dim action, got {action!r}")
        torque = float(np.clip(u[0], -MAX_TORQUE, MAX_TORQUE))

        theta = _angle_normalize(self._theta)
        cost = theta**2 + 0.1 * self._theta_dot**2 + 0.001 * torque**2
        theta_dot = self._theta_dot + DT * (
            3 * GRAVITY / (2 * LENGTH) * math.sin(self._theta)
            + 3.0 / (MASS * LENGTH**2) * torque)
        theta_dot = float(np.clip(theta_dot, -MAX_SPEED, MAX_SPEED))
        self._theta = self._theta + DT * theta_dot
        self._theta_dot = theta_dot
        self._steps += 1

        reward = -cost
        if self.noise_sigma > 0:
            reward += self.noise_sigma * self.rng.standard_normal()
        truncated = self._steps >= self.spec.max_episode_steps
        self._ended = truncated
        return StepResult(self._obs(), reward, False, truncated)
