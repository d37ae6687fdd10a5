"""Tensors with reverse-mode automatic differentiation.

A Tensor wraps a numpy array. Operations on tensors that require gradients
record a GraphNode on their result. Every backward rule is written in terms of
Tensor operations, so running ``backward`` with ``higher_order=True`` builds a
graph for the gradients themselves, which can then be differentiated again
(double backprop, as the gradient penalty needs).
"""

import threading
from contextlib import contextmanager

import numpy as np

DTYPES = {"f32": np.float32, "f64": np.float64}

_grad_state = threading.local()


def is_grad_enabled():
    return getattr(_grad_state, "enabled", True)


@contextmanager
def set_grad_enabled(enabled):
    previous = is_grad_enabled()
    _grad_state.enabled = bool(enabled)
    try:
        yield
    finally:
        _grad_state.enabled = previous


def no_grad():
    return set_grad_enabled(False)


def enable_grad():
    return set_grad_enabled(True)


def resolve_dtype(dtype):
    if dtype is None:
        return None
    if isinstance(dtype, str):
        if dtype not in DTYPES:
            raise ValueError(f"Unsupported dtype '{dtype}', expected one of {sorted(DTYPES)}")
        return np.dtype(DTYPES[dtype])
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"Unsupported dtype {dtype}, expected float32 or float64")
    return dtype


class GraphNode:
    """One recorded operation: its kind, its inputs and how to push a gradient back.

    ``backward_rule(grad, output)`` returns one gradient (or None) per input."""

    __slots__ = ("op_kind", "inputs", "saved", "backward_rule")

    def __init__(self, op_kind, inputs, backward_rule, saved=None):
        self.op_kind = op_kind
        self.inputs = tuple(inputs)
        self.backward_rule = backward_rule
        self.saved = saved or {}

    def __repr__(self):
        return f"GraphNode({self.op_kind}, inputs={len(self.inputs)})"


class Tensor:
    # Make numpy defer to Tensor's reflected operators (ndarray * Tensor)
    __array_priority__ = 1000

    def __init__(self, data, requires_grad=False, dtype=None):
        dtype = resolve_dtype(dtype)
        if isinstance(data, Tensor):
            data = data.data
        array = np.asarray(data)
        if dtype is None:
            dtype = array.dtype if array.dtype in (np.float32, np.float64) else np.float32
        self.data = np.ascontiguousarray(array, dtype=dtype)
        self.requires_grad = bool(requires_grad)
        self.node = None

    # -- properties ---------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self.node is None

    def numpy(self):
        return self.data

    def item(self):
        return self.data.item()

    def detach(self):
        return Tensor(self.data, dtype=self.data.dtype)

    def __repr__(self):
        grad = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{grad})"

    def __len__(self):
        return self.shape[0]

    # -- operators ----------------------------------------------------------
    # Imported lazily: ops imports this module

    def __add__(self, other):
        from . import ops

        return ops.add(self, other)

    def __radd__(self, other):
        from . import ops

        return ops.add(other, self)

    def __sub__(self, other):
        from . import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops

        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops

        return ops.mul(self, other)

    def __rmul__(self, other):
        from . import ops

        return ops.mul(other, self)

    def __truediv__(self, other):
        from . import ops

        return ops.div(self, other)

    def __rtruediv__(self, other):
        from . import ops

        return ops.div(other, self)

    def __neg__(self):
        from . import ops

        return ops.neg(self)

    def __pow__(self, exponent):
        from . import ops

        return ops.power(self, exponent)

    def __matmul__(self, other):
        from . import ops

        return ops.matmul(self, other)

    def sum(self, axis=None, keepdims=False):
        from . import ops

        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        from . import ops

        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        from . import ops

        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, axes=None):
        from . import ops

        return ops.transpose(self, axes)

    @property
    def T(self):  # pylint: disable=invalid-name
        return self.transpose()


def tensor(data, requires_grad=False, dtype=None):
    return Tensor(data, requires_grad=requires_grad, dtype=dtype)


def as_tensor(value, like=None):
    """Wrap plain numbers and arrays; constants take the dtype of ``like``"""
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(value, dtype=dtype)


def zeros_like(t):
    return Tensor(np.zeros_like(t.data))


def ones_like(t):
    return Tensor(np.ones_like(t.data))


def make_result(data, op_kind, inputs, backward_rule, saved=None):
    """Create an op's output and, when gradients flow, record its graph node"""
    out = Tensor(np.asarray(data))
    if is_grad_enabled() and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        out.node = GraphNode(op_kind, inputs, backward_rule, saved)
    return out


def _topological_order(root):
    """Tensors reachable from root through nodes that carry gradients, inputs first"""
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        current, expanded = stack.pop()
        if expanded:
            order.append(current)
            continue
        if id(current) in visited:
            continue
        visited.add(id(current))
        stack.append((current, True))
        if current.node is not None:
            for parent in current.node.inputs:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


def backward(loss, wrt, higher_order=False):
    """Gradients of a scalar ``loss`` with respect to each tensor in ``wrt``.

    Returns a dict keyed by the tensors of ``wrt``. Tensors that the loss does
    not depend on get a gradient of zeros. With ``higher_order`` the returned
    gradients are themselves graph nodes and can be differentiated again.
    """
    if loss.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    wrt = list(wrt)
    for target in wrt:
        if not isinstance(target, Tensor) or not target.requires_grad:
            raise ValueError("Every differentiation target must be a tensor with requires_grad=True")

    from . import ops

    grads = {id(loss): ones_like(loss)}
    with set_grad_enabled(higher_order):
        if loss.requires_grad:
            for current in reversed(_topological_order(loss)):
                node = current.node
                grad = grads.get(id(current))
                if node is None or grad is None:
                    continue
                input_grads = node.backward_rule(grad, current)
                for parent, parent_grad in zip(node.inputs, input_grads):
                    if parent_grad is None or not parent.requires_grad:
                        continue
                    previous = grads.get(id(parent))
                    grads[id(parent)] = parent_grad if previous is None else ops.add(previous, parent_grad)

    result = {}
    for target in wrt:
        grad = grads.get(id(target))
        if grad is None:
            grad = zeros_like(target)
        elif not higher_order:
            grad = grad.detach()
        result[target] = grad
    return result
