"""Adam optimizer state and update step."""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import backend as K
from .mlp import Grads, MlpParams, NumericalError


@dataclass
class AdamState:
    """First/second moment accumulators matching a parameter record."""

    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def copy(self) -> "AdamState":
        return AdamState([a.copy() for a in self.m], [a.copy() for a in self.v],
                         self.step, self.beta1, self.beta2, self.eps)


def adam_init(params: MlpParams, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> AdamState:
    arrays = params.arrays()
    return AdamState([np.zeros_like(a) for a in arrays],
                     [np.zeros_like(a) for a in arrays],
                     0, beta1, beta2, eps)


def adam_step(params: MlpParams, grads: Grads, state: AdamState, lr: float):
    """Bias-corrected Adam update, in place; returns (params, state).

    The step counter increments once per call. Raises on non-finite
    gradients (they would poison the accumulators irrecoverably).
    """
    g_arrays = grads.arrays()
    for g in g_arrays:
        if not np.isfinite(g).all():
            raise NumericalError("non-finite gradient in adam_step")
    state.step += 1
    for p, g, m, v in zip(params.arrays(), g_arrays, state.m, state.v):
        K.adam_update(p.reshape(-1), np.ascontiguousarray(g).reshape(-1),
                      m.reshape(-1), v.reshape(-1), state.step, lr,
                      state.beta1, state.beta2, state.eps)
    return params, state


@dataclass
class ScalarAdam:
    """Adam on a single scalar (used for the SAC entropy coefficient)."""

    m: float = 0.0
    v: float = 0.0
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def update(self, value: float, grad: float, lr: float) -> float:
        self.step += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1**self.step)
        v_hat = self.v / (1 - self.beta2**self.step)
        return value - lr * m_hat / (np.sqrt(v_hat) + self.eps)
