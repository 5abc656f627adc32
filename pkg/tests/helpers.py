"""Shared test utilities: finite-difference oracles and tiny net builders."""

import numpy as np

from ivrl.nn import Grads, MlpParams, forward_cached, loss_backward


def finite_difference_grads(params: MlpParams, inputs, loss_fn, step=1e-5) -> Grads:
    """Central-difference gradient of loss_fn(outputs) w.r.t. every parameter.

    Independent of the reverse-mode path: re-runs the forward pass per
    perturbed parameter entry.
    """

    def loss_at() -> float:
        y, _ = forward_cached(params, inputs, keep=False)
        return float(loss_fn(y)[0])

    d_w, d_b = [], []
    for arr_list, out in ((params.weights, d_w), (params.biases, d_b)):
        for arr in arr_list:
            g = np.zeros_like(arr)
            flat = arr.reshape(-1)
            gflat = g.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                up = loss_at()
                flat[i] = orig - step
                down = loss_at()
                flat[i] = orig
                gflat[i] = (up - down) / (2 * step)
            out.append(g)
    return Grads(d_w, d_b)


def grad_relative_error(analytic: Grads, numeric: Grads) -> float:
    """Max elementwise deviation relative to the numeric gradient's scale."""
    max_dev = 0.0
    scale = 0.0
    for a, n in zip(analytic.arrays(), numeric.arrays()):
        max_dev = max(max_dev, float(np.max(np.abs(a - n))))
        scale = max(scale, float(np.max(np.abs(n))))
    return max_dev / max(scale, 1e-12)


def check_gradients(params, inputs, loss_fn, tol=1e-4, step=1e-5) -> float:
    _, analytic = loss_backward(params, inputs, loss_fn)
    numeric = finite_difference_grads(params, inputs, loss_fn, step=step)
    err = grad_relative_error(analytic, numeric)
    assert err < tol, f"gradient mismatch: relative error {err:.3g}"
    return err


def const_net(layer_sizes, value=0.0) -> MlpParams:
    """Net with every weight and bias set to a constant."""
    ws = [np.full((i, o), value) for i, o in zip(layer_sizes[:-1], layer_sizes[1:])]
    bs = [np.full(o, value) for o in layer_sizes[1:]]
    return MlpParams(ws, bs)


def mse_loss(targets):
    """Loss-fn factory: mean squared error against fixed targets."""
    t = np.asarray(targets, dtype=np.float64)

    def fn(y):
        d = y - t
        return float(np.mean(d**2)), 2.0 * d / d.size

    return fn
