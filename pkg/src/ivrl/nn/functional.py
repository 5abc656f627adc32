"""Scalar/elementwise math used across the package."""

import numpy as np


def softplus(x):
    """ln(1 + e^x), stable for large |x|.

    For large positive x, softplus(x) -> x; for large negative x -> 0+.
    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    return out if out.ndim else float(out)


def sigmoid(x):
    """Logistic function, stable on both tails."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                   np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    return out if out.ndim else float(out)
