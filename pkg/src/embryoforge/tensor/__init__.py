"""N-dimensional tensors with reverse-mode (and higher-order) automatic differentiation"""

from .tensor import (
    Tensor,
    GraphNode,
    tensor,
    backward,
    no_grad,
    enable_grad,
    is_grad_enabled,
    set_grad_enabled,
    resolve_dtype,
)
from .conv import conv2d, conv2d_transpose
from .functional import (
    RunningStats,
    dense,
    leaky_relu,
    batch_norm,
    layer_norm,
    dropout,
    cross_entropy,
)
from . import ops
