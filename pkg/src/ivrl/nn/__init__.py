from .adam import AdamState, ScalarAdam, adam_init, adam_step
from .backend import BACKEND
from .functional import sigmoid, softplus
from .mlp import (Grads, MlpParams, NumericalError, ShapeError, backprop,
                  forward_cached, init_mlp, loss_backward, mlp_forward)

__all__ = [
    "AdamState", "ScalarAdam", "adam_init", "adam_step", "BACKEND",
    "sigmoid", "softplus", "Grads", "MlpParams", "NumericalError",
    "ShapeError", "backprop", "forward_cached", "init_mlp", "loss_backward",
    "mlp_forward",
]
