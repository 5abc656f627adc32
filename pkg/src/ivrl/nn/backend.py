"""Kernel backend selection.

Prefers the compiled extension; falls back to the NumPy implementation.
Set IVRL_BACKEND=numpy (or =native) to force a choice, e.g. for the
backend benchmark.
"""

import os

from . import _kernels_np

_requested = os.environ.get("IVRL_BACKEND", "").lower()

if _requested == "numpy":
    kernels = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _native

        kernels = _native
        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise
        kernels = _kernels_np
        BACKEND = "numpy"

linear_forward = kernels.linear_forward
linear_backward = kernels.linear_backward
relu_grad_inplace = kernels.relu_grad_inplace
adam_update = kernels.adam_update
solve_xi_bisect = kernels.solve_xi_bisect
