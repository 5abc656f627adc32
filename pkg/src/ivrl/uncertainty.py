"""Predictive-uncertainty machinery for value estimation.

Covers variance networks trained by heteroscedastic negative log-likelihood
(loss attenuation), frozen additive prior networks, and the two ensemble
variance estimators: the sampled variance of member means, and the variance
of the Gaussian mixture formed by variance-network members.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .nn import AdamState, MlpParams, ShapeError, init_mlp, mlp_forward, softplus

# Lower bound applied to every predicted variance; keeps the attenuation
# loss and inverse-variance weights away from division blow-ups.
VAR_FLOOR = 1e-6

# Raw variance-head bias giving softplus(bias) = 1, so fresh networks
# start with unit predicted variance.
RAW_VAR_BIAS = math.log(math.e - 1.0)


@dataclass
class VarPrediction:
    """Predicted mean and variance of a Q-value estimate."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.sigma2)):
            raise ValueError("non-finite prediction")
        if self.sigma2 < VAR_FLOOR:
            raise ValueError(f"variance {self.sigma2} below floor {VAR_FLOOR}")


@dataclass
class PriorPair:
    """A trainable network plus a frozen prior added to its mean output."""

    trainable: MlpParams
    prior: MlpParams
    delta_rpf: float = 0.0


@dataclass
class EnsembleState:
    """N trainable/prior pairs with matched target networks and Adam states."""

    members: List[PriorPair]
    targets: List[MlpParams]
    adam: List[AdamState]

    @property
    def n(self) -> int:
        return len(self.members)


def init_var_net(input_dim: int, hidden: Sequence[int], n_heads: int,
                 rng: np.random.Generator) -> MlpParams:
    """Variance network: 2*n_heads outputs (means then raw variances).

    The raw-variance bias entries start at softplus^-1(1) so the initial
    predicted variance is about 1.
    """
    params = init_mlp([input_dim, *hidden, 2 * n_heads], rng)
    params.biases[-1][n_heads:] = RAW_VAR_BIAS
    return params


def var_activation(raw) -> np.ndarray:
    """Map a raw variance-head output to a floored positive variance."""
    return softplus(raw) + VAR_FLOOR


def var_net_predict(pair: PriorPair, s: np.ndarray, a) -> VarPrediction:
    """Evaluate one variance-network member at (s, a).

    The frozen prior shifts the mean only; the variance head is untouched.
    Discrete actions are head indices into a 2*n_actions output; continuous
    actions are concatenated onto the state.
    """
    if np.isscalar(a) or isinstance(a, (int, np.integer)):
        out = mlp_forward(pair.trainable, np.asarray(s, dtype=np.float64))
        n_actions = out.shape[-1] // 2
        if not 0 <= int(a) < n_actions:
            raise ShapeError(f"action index {a} out of range for {n_actions} heads")
        mu = out[int(a)]
        raw = out[n_actions + int(a)]
        if pair.delta_rpf != 0.0:
            mu += pair.delta_rpf * mlp_forward(pair.prior, np.asarray(s, dtype=np.float64))[int(a)]
    else:
        x = np.concatenate([np.asarray(s, dtype=np.float64),
                            np.asarray(a, dtype=np.float64)])
        out = mlp_forward(pair.trainable, x)
        mu, raw = out[0], out[1]
        if pair.delta_rpf != 0.0:
            mu += pair.delta_rpf * mlp_forward(pair.prior, x)[0]
    return VarPrediction(float(mu), float(var_activation(raw)))


def loss_attenuation(preds: Sequence[VarPrediction], targets: Sequence[float]) -> float:
    """Heteroscedastic Gaussian negative log-likelihood (up to constants).

    (1/K) sum_k [(mu_k - y_k)^2 / sigma2_k + ln sigma2_k]
    """
    if len(preds) != len(targets) or len(preds) == 0:
        raise ValueError("preds and targets must have equal nonzero length")
    mu = np.array([p.mu for p in preds])
    s2 = np.array([p.sigma2 for p in preds])
    y = np.asarray(targets, dtype=np.float64)
    return float(np.mean((mu - y) ** 2 / s2 + np.log(s2)))


def sampled_ensemble_variance(mus: Sequence[float]) -> Tuple[float, float]:
    """Population mean and variance of point-ensemble member outputs."""
    mus = np.asarray(mus, dtype=np.float64)
    if mus.size < 2:
        raise ValueError("sampled ensembles need at least 2 members")
    mean = float(mus.mean())
    return mean, float(np.mean((mus - mean) ** 2))


def mixture_moments(mus: np.ndarray, sigma2s: np.ndarray, axis: int = 0):
    """Mean and variance of the equal-weight Gaussian mixture along `axis`.

    variance = mean member variance + population variance of member means.
    """
    mu = np.mean(mus, axis=axis)
    sigma2 = np.mean(sigma2s, axis=axis) + np.mean(np.square(mus), axis=axis) - np.square(mu)
    return mu, sigma2


def mixture_variance(preds: Sequence[VarPrediction]) -> VarPrediction:
    """Collapse member (mu, sigma2) predictions into one mixture prediction."""
    if len(preds) == 0:
        raise ValueError("mixture of zero members")
    if len(preds) == 1:
        return preds[0]
    mus = np.array([p.mu for p in preds])
    s2s = np.array([p.sigma2 for p in preds])
    mu, sigma2 = mixture_moments(mus, s2s)
    return VarPrediction(float(mu), float(sigma2))


def soft_update_params(target: MlpParams, source: MlpParams, tau: float) -> MlpParams:
    """target <- (1 - tau) * target + tau * source, elementwise in place."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    for t, s in zip(target.arrays(), source.arrays()):
        t *= 1.0 - tau
        t += tau * s
    return target


def soft_update_targets(ens: EnsembleState, tau: float) -> EnsembleState:
    """Blend every target network toward its paired trainable network."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    for pair, target in zip(ens.members, ens.targets):
        soft_update_params(target, pair.trainable, tau)
    return ens
