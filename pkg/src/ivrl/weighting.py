"""Sample-weighting mathematics for uncertainty-aware TD learning.

Implements batch inverse-variance (BIV) weighting with its effective batch
size constraint, the combined inverse-variance loss (BIV + loss
attenuation), the weighted actor objective, and the SUNRISE/UWAC weighting
schemes used for comparison.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, NumericalError
from .nn import backend
from .nn.functional import sigmoid
from .uncertainty import VarPrediction, loss_attenuation

log = logging.getLogger(__name__)

# Hard clip on UWAC weights (before the 1/K factor).
UWAC_CLIP = 1.5

# Search range multiplier: xi is never raised above this times the largest
# variance. Past that point weights are near-uniform anyway.
XI_BOUND_FACTOR = 1e6


@dataclass(frozen=True)
class WeightScheme:
    """Sample-weighting variant plus its hyperparameters.

    kind 'biv' uses mebs_ratio (minimal effective batch size as a fraction
    of the batch) unless fixed_xi is set; 'sunrise' uses temperature;
    'uwac' uses beta; 'uniform' has no parameters.
    """

    kind: str = "uniform"
    mebs_ratio: float = 0.5
    fixed_xi: Optional[float] = None
    temperature: float = 20.0
    beta: float = 1.6

    def __post_init__(self):
        if self.kind not in ("biv", "sunrise", "uwac", "uniform"):
            raise ConfigError(f"unknown weighting kind {self.kind!r}")
        if not 0.0 < self.mebs_ratio < 1.0:
            raise ConfigError(f"mebs_ratio must be in (0, 1), got {self.mebs_ratio}")
        if self.temperature <= 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")
        if self.fixed_xi is not None and self.fixed_xi < 0:
            raise ConfigError(f"fixed_xi must be >= 0, got {self.fixed_xi}")


@dataclass
class WeightedBatch:
    """Resolved per-sample weights for one minibatch."""

    variances: np.ndarray
    xi: float
    weights: np.ndarray


def _check_denoms(variances: np.ndarray, xi: float) -> np.ndarray:
    denoms = variances + xi
    if np.any(denoms <= 0.0):
        raise NumericalError("nonpositive denominator sigma2 + xi")
    return denoms


def ebs(variances, xi: float) -> float:
    """Effective batch size (sum w)^2 / sum w^2 for w = 1/(sigma2 + xi).

    Always in [1, K]; equals K exactly for equal variances.
    """
    v = np.asarray(variances, dtype=np.float64)
    if v.size == 0:
        raise ConfigError("ebs of empty batch")
    w = 1.0 / _check_denoms(v, xi)
    return float(w.sum() ** 2 / np.square(w).sum())


def _ebs_at_zero_limit(v: np.ndarray) -> float:
    """lim_{xi -> 0+} EBS. Zero-variance samples dominate equally."""
    n_zero = int(np.count_nonzero(v == 0.0))
    if n_zero > 0:
        return float(n_zero)
    return ebs(v, 0.0)


def solve_xi(variances, mebs: float, method: str = "bisect",
             rtol: float = 1e-7) -> float:
    """Smallest xi >= 0 such that ebs(variances, xi) >= mebs.

    Returns 0 when the constraint already holds in the xi -> 0+ limit;
    otherwise resolves the boundary to `rtol` relative precision, always
    landing on the feasible side. If even the search upper bound cannot
    reach mebs, returns the bound and logs a warning (weights are then
    near-uniform).

    method 'bisect' exploits monotonicity of EBS in xi (and runs through
    the compiled kernel when available); 'nelder-mead' matches the
    derivative-free formulation, agreeing within 1e-4.
    """
    v = np.ascontiguousarray(variances, dtype=np.float64)
    k = v.size
    if np.any(v < 0):
        raise ConfigError("negative variance")
    if not 1.0 <= mebs <= k * 0.999:
        raise ConfigError(f"mebs {mebs} outside [1, 0.999*K] for K={k}")
    if _ebs_at_zero_limit(v) >= mebs:
        return 0.0
    hi_cap = XI_BOUND_FACTOR * float(v.max())
    if ebs(v, hi_cap) < mebs:
        log.warning("EBS %.3f still below MEBS %.3f at xi bound %.3g",
                    ebs(v, hi_cap), mebs, hi_cap)
        return hi_cap
    if method == "bisect":
        guess = max(float(v.mean()), 1e-12)
        return float(backend.solve_xi_bisect(v, mebs, guess, hi_cap, rtol))
    if method == "nelder-mead":
        return _solve_xi_nelder_mead(v, mebs, hi_cap)
    raise ConfigError(f"unknown solve_xi method {method!r}")


def _solve_xi_nelder_mead(v: np.ndarray, mebs: float, hi_cap: float) -> float:
    from scipy.optimize import minimize

    # The gap |EBS - MEBS| is minimized (to zero) exactly at the smallest
    # feasible xi; optimize over log xi to cope with the dynamic range.
    # fatol is disabled so the simplex width criterion governs precision.
    def gap(z):
        return abs(ebs(v, float(np.exp(z[0]))) - mebs)

    z0 = np.log(max(float(v.mean()), 1e-12))
    res = minimize(gap, x0=[z0], method="Nelder-Mead",
                   options={"xatol": 1e-11, "fatol": 1e-300,
                            "maxiter": 5000, "maxfev": 5000})
    xi = float(np.exp(res.x[0]))
    # Land on the feasible side of the constraint.
    step = 1.0 + 1e-9
    while ebs(v, xi) < mebs and xi < hi_cap:
        xi *= step
        step = step * step
    return min(xi, hi_cap)


def biv_weights(variances, xi: float) -> WeightedBatch:
    """Normalized inverse-variance weights w_k = 1/(sigma2_k + xi)."""
    v = np.asarray(variances, dtype=np.float64)
    w = 1.0 / _check_denoms(v, xi)
    w /= w.sum()
    return WeightedBatch(v, float(xi), w)


def biv_loss(preds, targets, variances, xi: float) -> float:
    """Inverse-variance weighted squared error, normalized within the batch."""
    p = np.asarray(preds, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape:
        raise ConfigError("preds and targets length mismatch")
    wb = biv_weights(variances, xi)
    return float(np.sum(wb.weights * (p - t) ** 2))


def ivrl_loss(preds: Sequence[VarPrediction], targets, target_variances,
              gamma: float, xi: float, lam: float) -> float:
    """Combined loss: BIV on means with gamma^2-scaled target variances,
    plus lam times the loss-attenuation term on the network's own variance.
    """
    if lam < 0:
        raise ConfigError(f"lambda must be >= 0, got {lam}")
    mu = np.array([p.mu for p in preds])
    tv = np.asarray(target_variances, dtype=np.float64)
    biv = biv_loss(mu, targets, gamma**2 * tv, xi)
    if lam == 0.0:
        return biv
    return biv + lam * loss_attenuation(preds, targets)


def actor_loss(mu_q, sigma2_q, log_pi, alpha: float, xi: float) -> float:
    """Inverse-variance weighted actor objective.

    Normalized weighted mean of (alpha * log_pi_k - mu_q_k) with weights
    1/(sigma2_q_k + xi).
    """
    if alpha < 0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}")
    mq = np.asarray(mu_q, dtype=np.float64)
    lp = np.asarray(log_pi, dtype=np.float64)
    if mq.shape != lp.shape:
        raise ConfigError("mu_q and log_pi length mismatch")
    wb = biv_weights(sigma2_q, xi)
    return float(np.sum(wb.weights * (alpha * lp - mq)))


def sunrise_weight(sigma, temperature: float):
    """sigmoid(-sigma * T) + 0.5, in (0.5, 1]; applied per sample over 1/K."""
    if temperature <= 0:
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    out = sigmoid(-np.asarray(sigma, dtype=np.float64) * temperature) + 0.5
    return out if isinstance(out, np.ndarray) else float(out)


def uwac_weight(sigma2, beta: float):
    """min(beta / sigma2, 1.5); applied per sample over 1/K."""
    if beta <= 0:
        raise ConfigError(f"beta must be > 0, got {beta}")
    out = np.minimum(beta / np.asarray(sigma2, dtype=np.float64), UWAC_CLIP)
    return out if out.ndim else float(out)


@dataclass
class ResolvedWeights:
    """Per-sample loss weights for one update, plus diagnostics."""

    weights: np.ndarray
    xi: float
    ebs: float


def resolve_weights(scheme: WeightScheme, variances: np.ndarray,
                    solve_method: str = "bisect") -> ResolvedWeights:
    """Turn a weighting scheme and per-sample variances into loss weights.

    BIV weights are normalized to sum 1; SUNRISE/UWAC are per-sample
    factors over 1/K (not re-normalized); uniform is plain 1/K. The
    reported EBS is (sum w)^2 / sum w^2 of the applied weights.
    """
    v = np.asarray(variances, dtype=np.float64)
    k = v.size
    if k == 0:
        raise ConfigError("empty batch")
    if scheme.kind == "uniform":
        return ResolvedWeights(np.full(k, 1.0 / k), 0.0, float(k))
    if scheme.kind == "biv":
        if k == 1:
            return ResolvedWeights(np.ones(1), 0.0, 1.0)
        if scheme.fixed_xi is not None:
            xi = scheme.fixed_xi
        else:
            xi = solve_xi(v, max(1.0, scheme.mebs_ratio * k), method=solve_method)
        wb = biv_weights(v, xi)
        return ResolvedWeights(wb.weights, xi, ebs(v, xi))
    if scheme.kind == "sunrise":
        w = sunrise_weight(np.sqrt(v), scheme.temperature) / k
    else:  # uwac
        w = uwac_weight(v, scheme.beta) / k
    realized = float(w.sum() ** 2 / np.square(w).sum()) if np.any(w > 0) else 1.0
    return ResolvedWeights(w, 0.0, realized)
