"""Shared agent plumbing: training hyperparameters, diagnostics, weights."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..weighting import (WeightScheme, XI_BOUND_FACTOR, biv_weights, ebs,
                         solve_xi, sunrise_weight, uwac_weight)
from ..nn import backend


@dataclass
class TrainParams:
    """Optimization and schedule hyperparameters (algorithm shape lives in
    AgentVariant). Defaults follow the DQN family; the config layer swaps
    in SAC-family defaults (lr 3e-4, tau 0.005, hidden 256)."""

    lr: float = 1e-3
    gamma: float = 0.99
    tau: float = 0.01
    batch_size: int = 64
    buffer_capacity: int = 100_000
    warmup: int = 1000
    updates_per_step: float = 1.0
    hidden: Tuple[int, ...] = (64, 64)
    epsilon_start: float = 1.0
    epsilon_end: float = 0.01
    epsilon_decay: float = 0.99
    actor_lr: float = 3e-4
    alpha_lr: float = 3e-4
    alpha_init: float = 1.0
    fixed_alpha: Optional[float] = None
    target_entropy: Optional[float] = None
    xi_solver: str = "bisect"


@dataclass
class UpdateDiagnostics:
    """Per-update summary; the harness aggregates these per episode."""

    var_mean: float = 0.0
    var_median: float = 0.0
    xi_critic: float = 0.0
    xi_actor: float = 0.0
    ebs: float = 0.0
    loss_biv: float = 0.0
    loss_la: float = 0.0


def solve_xi_fast(v: np.ndarray, mebs: float, rtol: float = 1e-6) -> float:
    """Hot-path xi solve; assumes floored positive variances."""
    if ebs(v, 0.0) >= mebs:
        return 0.0
    hi_cap = XI_BOUND_FACTOR * float(v.max())
    guess = max(float(v.mean()), 1e-12)
    return float(backend.solve_xi_bisect(v, mebs, guess, hi_cap, rtol))


def scheme_weights(scheme: WeightScheme, variances: np.ndarray,
                   xi_solver: str = "bisect") -> Tuple[np.ndarray, float, float]:
    """Loss weights for the given per-sample variances.

    Returns (weights, xi, realized_ebs). BIV weights are normalized to sum
    one; SUNRISE/UWAC are per-sample factors over 1/K; uniform is 1/K.
    """
    k = variances.size
    if scheme.kind == "uniform":
        return np.full(k, 1.0 / k), 0.0, float(k)
    if scheme.kind == "biv":
        if k == 1:
            return np.ones(1), 0.0, 1.0
        if scheme.fixed_xi is not None:
            xi = scheme.fixed_xi
        elif xi_solver == "bisect":
            xi = solve_xi_fast(variances, max(1.0, scheme.mebs_ratio * k))
        else:
            xi = solve_xi(variances, max(1.0, scheme.mebs_ratio * k),
                          method=xi_solver)
        w = biv_weights(variances, xi).weights
        return w, xi, ebs(variances, xi)
    if scheme.kind == "sunrise":
        w = sunrise_weight(np.sqrt(variances), scheme.temperature) / k
    else:
        w = uwac_weight(variances, scheme.beta) / k
    realized = float(w.sum() ** 2 / np.square(w).sum()) if np.any(w > 0) else 1.0
    return w, 0.0, realized
