"""Cart-pole balancing with additive Gaussian reward noise.

Classic physics (Euler integration, force +-10 N) with a per-step reward
of 1 plus zero-mean Gaussian noise; noise_sigma=0 recovers the noiseless
classic task exactly.
"""

import math

import numpy as np

from ..errors import ConfigError
from .base import EnvSpec, EpisodeOver, StepResult

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
POLE_HALF_LENGTH = 0.5
POLE_MASS_LENGTH = POLE_MASS * POLE_HALF_LENGTH
FORCE_MAG = 10.0
DT = 0.02
THETA_LIMIT = 12.0 * math.pi / 180.0
X_LIMIT = 2.4


class CartPoleNoise:
    def __init__(self, noise_sigma: float = 1.0, max_steps: int = 1000,
                 seed=None):
        if noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        self.noise_sigma = noise_sigma
        self.spec = EnvSpec(state_dim=4, n_actions=2, max_episode_steps=max_steps,
                            solve_threshold=750.0)
        self.rng = np.random.default_rng(seed)
        self._state = None
        self._steps = 0
        self._ended = True

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self._state = self.rng.uniform(-0.05, 0.05, size=4)
        self._steps = 0
        self._ended = False
        return self._state.copy()

    def step(self, action) -> StepResult:
        if self._ended:
            raise EpisodeOver("cartpole episode has ended")
        if action not in (0, 1):
            raise ConfigError(f"invalid cartpole action {action!r}")
        x, x_dot, theta, theta_dot = self._state
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sin_t) / TOTAL_MASS
        theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
            POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t**2 / TOTAL_MASS))
        x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
        x += DT * x_dot
        x_dot += DT * x_acc
        theta += DT * theta_dot
        theta_dot += DT * theta_acc
        self._state = np.array([x, x_dot, theta, theta_dot])
        self._steps += 1

        reward = 1.0
        if self.noise_sigma > 0:
            reward += self.noise_sigma * self.rng.standard_normal()
        done = bool(abs(x) > X_LIMIT or abs(theta) > THETA_LIMIT)
        truncated = not done and self._steps >= self.spec.max_episode_steps
        self._ended = done or truncated
        return StepResult(self._state.copy(), reward, done, truncated)
