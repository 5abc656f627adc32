"""Discrete mountain car: sparse -1 per-step reward until the goal."""

import math

import numpy as np

from ..errors import ConfigError
from .base import EnvSpec, EpisodeOver, StepResult

MIN_POSITION = -1.2
MAX_POSITION = 0.6
MAX_SPEED = 0.07
GOAL_POSITION = 0.5
FORCE = 0.001
GRAVITY = 0.0025


class MountainCar:
    def __init__(self, max_steps: int = 200, seed=None):
        self.spec = EnvSpec(state_dim=2, n_actions=3, max_episode_steps=max_steps,
                            solve_threshold=-150.0)
        self.rng = np.random.default_rng(seed)
        self._state = None
        self._steps = 0
        self._ended = True

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self._state = np.array([self.rng.uniform(-0.6, -0.4), 0.0])
        self._steps = 0
        self._ended = False
        return self._state.copy()

    def step(self, action) -> StepResult:
        if self._ended:
            raise EpisodeOver("mountain car episode has ended")
        if action not in (0, 1, 2):
            raise ConfigError(f"invalid mountain car action {action!r}")
        position, velocity = self._state
        velocity += (action - 1) * FORCE + math.cos(3 * position) * (-GRAVITY)
        velocity = float(np.clip(velocity, -MAX_SPEED, MAX_SPEED))
        position = float(np.clip(position + velocity, MIN_POSITION, MAX_POSITION))
        if position <= MIN_POSITION and velocity < 0:
            velocity = 0.0
        self._state = np.array([position, velocity])
        self._steps += 1

        done = position >= GOAL_POSITION
        truncated = not done and self._steps >= self.spec.max_episode_steps
        self._ended = done or truncated
        return StepResult(self._state.copy(), -1.0, done, truncated)
