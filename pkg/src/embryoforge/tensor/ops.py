"""Differentiable elementwise, reduction and shape operations.

Every backward rule below is itself written with these operations, which is
what makes gradients differentiable a second time.
"""

import builtins

import numpy as np

from ..common.errors import DimensionError
from .tensor import Tensor, as_tensor, make_result


def _pair(a, b):
    if isinstance(a, Tensor):
        return a, as_tensor(b, like=a)
    b = as_tensor(b)
    return as_tensor(a, like=b), b


def _needs(t):
    return t.requires_grad


def _reduce_to_shape(array, shape):
    extra = array.ndim - len(shape)
    if extra:
        array = array.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, size in enumerate(shape) if size == 1 and array.shape[i] != 1)
    if axes:
        array = array.sum(axis=axes, keepdims=True)
    return array.reshape(shape)


def _normalize_axes(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(sorted(a % ndim for a in axis))


# -- broadcasting -------------------------------------------------------------


def broadcast_to(a, shape):
    shape = tuple(shape)
    if a.shape == shape:
        return a

    def rule(g, out):
        return (sum_to(g, a.shape),)

    return make_result(np.broadcast_to(a.data, shape), "broadcast_to", (a,), rule)


def sum_to(a, shape):
    """Sum a broadcast result back down to ``shape``"""
    shape = tuple(shape)
    if a.shape == shape:
        return a

    def rule(g, out):
        return (broadcast_to(g, a.shape),)

    return make_result(_reduce_to_shape(a.data, shape), "sum_to", (a,), rule)


# -- arithmetic ---------------------------------------------------------------


def add(a, b):
    a, b = _pair(a, b)

    def rule(g, out):
        return (
            sum_to(g, a.shape) if _needs(a) else None,
            sum_to(g, b.shape) if _needs(b) else None,
        )

    return make_result(a.data + b.data, "add", (a, b), rule)


def sub(a, b):
    a, b = _pair(a, b)

    def rule(g, out):
        return (
            sum_to(g, a.shape) if _needs(a) else None,
            sum_to(neg(g), b.shape) if _needs(b) else None,
        )

    return make_result(a.data - b.data, "sub", (a, b), rule)


def mul(a, b):
    a, b = _pair(a, b)

    def rule(g, out):
        return (
            sum_to(mul(g, b), a.shape) if _needs(a) else None,
            sum_to(mul(g, a), b.shape) if _needs(b) else None,
        )

    return make_result(a.data * b.data, "mul", (a, b), rule)


def div(a, b):
    a, b = _pair(a, b)

    def rule(g, out):
        return (
            sum_to(div(g, b), a.shape) if _needs(a) else None,
            sum_to(neg(div(mul(g, a), mul(b, b))), b.shape) if _needs(b) else None,
        )

    return make_result(a.data / b.data, "div", (a, b), rule)


def neg(a):
    def rule(g, out):
        return (neg(g),)

    return make_result(-a.data, "neg", (a,), rule)


def power(a, exponent):
    """Raise to a constant real exponent"""
    if isinstance(exponent, Tensor):
        raise TypeError("power only supports a constant exponent")
    exponent = float(exponent)

    def rule(g, out):
        if exponent == 1.0:
            return (g,)
        return (mul(g, mul(power(a, exponent - 1.0), exponent)),)

    return make_result(a.data**exponent, "power", (a,), rule)


def matmul(a, b):
    a, b = _pair(a, b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

    def rule(g, out):
        return (
            matmul(g, transpose(b)) if _needs(a) else None,
            matmul(transpose(a), g) if _needs(b) else None,
        )

    return make_result(a.data @ b.data, "matmul", (a, b), rule)


# -- elementwise functions ------------------------------------------------------


def exp(a):
    def rule(g, out):
        return (mul(g, out),)

    return make_result(np.exp(a.data), "exp", (a,), rule)


def log(a):
    def rule(g, out):
        return (div(g, a),)

    return make_result(np.log(a.data), "log", (a,), rule)


def sqrt(a):
    def rule(g, out):
        return (div(g, mul(out, 2.0)),)

    return make_result(np.sqrt(a.data), "sqrt", (a,), rule)


def tanh(a):
    def rule(g, out):
        return (mul(g, sub(1.0, mul(out, out))),)

    return make_result(np.tanh(a.data), "tanh", (a,), rule)


def sigmoid(a):
    e = np.exp(-np.abs(a.data))
    value = np.where(a.data >= 0, 1.0 / (1.0 + e), e / (1.0 + e)).astype(a.dtype)

    def rule(g, out):
        return (mul(g, mul(out, sub(1.0, out))),)

    return make_result(value, "sigmoid", (a,), rule)


def clip(a, low, high):
    """Clamp to [low, high]; the gradient is zero where clamping happened"""
    inside = Tensor(((a.data >= low) & (a.data <= high)).astype(a.dtype))

    def rule(g, out):
        return (mul(g, inside),)

    return make_result(np.clip(a.data, low, high), "clip", (a,), rule)


# -- reductions -----------------------------------------------------------------


def sum(a, axis=None, keepdims=False):  # pylint: disable=redefined-builtin
    axes = _normalize_axes(axis, a.ndim)
    kept_shape = tuple(1 if i in axes else size for i, size in enumerate(a.shape))

    def rule(g, out):
        return (broadcast_to(reshape(g, kept_shape), a.shape),)

    return make_result(np.sum(a.data, axis=axes, keepdims=keepdims), "sum", (a,), rule)


def mean(a, axis=None, keepdims=False):
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
    return mul(sum(a, axis=axes, keepdims=keepdims), 1.0 / builtins.max(count, 1))


# -- shape ----------------------------------------------------------------------


def reshape(a, shape):
    shape = tuple(shape)
    if a.shape == shape:
        return a

    def rule(g, out):
        return (reshape(g, a.shape),)

    return make_result(a.data.reshape(shape), "reshape", (a,), rule)


def transpose(a, axes=None):
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def rule(g, out):
        return (transpose(g, inverse),)

    return make_result(np.transpose(a.data, axes), "transpose", (a,), rule)


def flatten(a):
    """Keep the batch axis, merge all others"""
    return reshape(a, (a.shape[0], int(np.prod(a.shape[1:]))))
