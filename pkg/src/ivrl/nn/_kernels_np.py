"""NumPy reference implementation of the hot training kernels.

Same call signatures as the compiled `_kernels` extension; selected as a
fallback when the extension is unavailable (see `ivrl.nn.backend`).
"""

import numpy as np


def linear_forward(x, w, b, relu):
    """y = x @ w + b, with ReLU applied when `relu` is true.

    x: (B, I), w: (I, O), b: (O,) -> (B, O), all float64 C-contiguous.
    """
    y = x @ w
    y += b
    if relu:
        np.maximum(y, 0.0, out=y)
    return y


def linear_backward(g_y, x, w, need_dx):
    """Gradients of a linear layer given upstream grad g_y (B, O).

    Returns (dw, db, dx) where dx is None when not requested. The caller
    applies the ReLU mask to dx itself (via `relu_grad_inplace`), since only
    it knows whether the layer input was an activation.
    """
    dw = x.T @ g_y
    db = g_y.sum(axis=0)
    dx = g_y @ w.T if need_dx else None
    return dw, db, dx


def relu_grad_inplace(g, act):
    """Zero entries of g where the forward activation was clipped."""
    g *= act > 0.0


def adam_update(p, g, m, v, t, lr, beta1, beta2, eps):
    """One Adam step with bias correction, updating p, m, v in place.

    All arrays are flat float64 views of one parameter tensor; t is the
    step count *after* incrementing.
    """
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * np.square(g)
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    p -= lr * m_hat / (np.sqrt(v_hat) + eps)


def _ebs(v, xi):
    w = 1.0 / (v + xi)
    return w.sum() ** 2 / np.square(w).sum()


def solve_xi_bisect(v, mebs, guess, hi_cap, rtol):
    """Smallest xi with EBS >= mebs: doubling bracket then bisection.

    Caller guarantees EBS < mebs at xi=0+ and EBS >= mebs at hi_cap.
    """
    lo, hi = 0.0, guess
    while _ebs(v, hi) < mebs:
        lo = hi
        hi *= 2.0
        if hi >= hi_cap:
            hi = hi_cap
            break
    while hi - lo > 1e-12 + rtol * hi:
        mid = 0.5 * (lo + hi)
        if _ebs(v, mid) >= mebs:
            hi = mid
        else:
            lo = mid
    return hi
