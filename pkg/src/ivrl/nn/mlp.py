"""Fixed-architecture MLPs with exact reverse-mode gradients.

Networks are ReLU-activated hidden layers with a linear output layer,
held as plain float64 arrays. Forward/backward run through the selected
kernel backend (compiled extension or NumPy fallback).
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import NumericalError, ShapeError
from . import backend as K


@dataclass
class MlpParams:
    """Weights and biases per layer; hidden layers ReLU, output linear.

    weights[i] has shape (fan_in, fan_out); biases[i] has shape (fan_out,).
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def arrays(self) -> List[np.ndarray]:
        """All parameter tensors in a fixed order (weights then bias per layer)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])

    def validate(self):
        for i in range(len(self.weights) - 1):
            if self.weights[i].shape[1] != self.weights[i + 1].shape[0]:
                raise ShapeError(
                    f"layer {i} output width {self.weights[i].shape[1]} != "
                    f"layer {i + 1} input width {self.weights[i + 1].shape[0]}")
        for w, b in zip(self.weights, self.biases):
            if b.shape != (w.shape[1],):
                raise ShapeError(f"bias shape {b.shape} does not match weight {w.shape}")
        if not all(np.isfinite(a).all() for a in self.arrays()):
            raise NumericalError("non-finite parameter values")


@dataclass
class Grads:
    """Gradient of a scalar loss w.r.t. every entry of an MlpParams."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def arrays(self) -> List[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


def init_mlp(layer_sizes: Sequence[int], rng: np.random.Generator) -> MlpParams:
    """Uniform +-1/sqrt(fan_in) init for weights and biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParams(weights, biases)


def _as_batch(x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def mlp_forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a single input (d,) or a batch (B, d)."""
    y, _ = forward_cached(params, x, keep=False)
    return y


def forward_cached(params: MlpParams, x: np.ndarray, keep: bool = True):
    """Forward pass returning (output, activations) for later backprop.

    activations[0] is the input batch; activations[i] the post-ReLU output
    of layer i (post-linear for the last layer).
    """
    xb, squeeze = _as_batch(x)
    if xb.shape[1] != params.weights[0].shape[0]:
        raise ShapeError(
            f"input width {xb.shape[1]} != first layer width "
            f"{params.weights[0].shape[0]}")
    n_layers = len(params.weights)
    acts = [xb] if keep else None
    h = xb
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = K.linear_forward(h, w, b, i < n_layers - 1)
        if keep:
            acts.append(h)
    return (h[0] if squeeze else h), acts


def backprop(params: MlpParams, acts: List[np.ndarray], grad_out: np.ndarray,
             need_input_grad: bool = False) -> Tuple[Grads, Optional[np.ndarray]]:
    """Reverse pass from d(loss)/d(output) to parameter (and input) grads."""
    g = np.ascontiguousarray(grad_out, dtype=np.float64)
    if g.ndim == 1:
        g = g[None, :]
    n_layers = len(params.weights)
    d_w: List[Optional[np.ndarray]] = [None] * n_layers
    d_b: List[Optional[np.ndarray]] = [None] * n_layers
    for i in range(n_layers - 1, -1, -1):
        need_dx = i > 0 or need_input_grad
        dw, db, dx = K.linear_backward(g, acts[i], params.weights[i], need_dx)
        d_w[i], d_b[i] = dw, db
        if i > 0:
            K.relu_grad_inplace(dx, acts[i])
        g = dx
    return Grads(d_w, d_b), (g if need_input_grad else None)


def loss_backward(params: MlpParams, inputs: np.ndarray,
                  loss_fn: Callable[[np.ndarray], Tuple[float, np.ndarray]]
                  ) -> Tuple[float, Grads]:
    """Gradient of a scalar loss defined on the network outputs.

    loss_fn maps the output batch to (loss, d loss / d outputs). Raises
    NumericalError when the loss or its output gradient is non-finite.
    """
    y, acts = forward_cached(params, inputs)
    loss, grad_y = loss_fn(y)
    if not np.isfinite(loss):
        raise NumericalError(f"non-finite loss {loss!r}")
    if not np.isfinite(grad_y).all():
        raise NumericalError("non-finite loss gradient w.r.t. outputs")
    grads, _ = backprop(params, acts, grad_y)
    return float(loss), grads
