"""Neural-network layer functions built from the differentiable ops"""

import numpy as np

from ..common.errors import DimensionError
from . import ops
from .tensor import Tensor

DEFAULT_SLOPE = 0.2
DEFAULT_EPS = 1e-5
DEFAULT_MOMENTUM = 0.9


class RunningStats:
    """Per-channel running mean/variance of a batch-norm layer"""

    def __init__(self, channels, momentum=DEFAULT_MOMENTUM, dtype=np.float32):
        self.mean = np.zeros(channels, dtype=dtype)
        self.var = np.ones(channels, dtype=dtype)
        self.momentum = momentum

    def update(self, batch_mean, batch_var):
        self.mean = (self.momentum * self.mean + (1.0 - self.momentum) * batch_mean).astype(self.mean.dtype)
        self.var = (self.momentum * self.var + (1.0 - self.momentum) * batch_var).astype(self.var.dtype)


def _channel_shape(x):
    # gamma/beta of shape [C] broadcast over [N, C, ...]
    return (1, x.shape[1]) + (1,) * (x.ndim - 2)


def dense(x, weight, bias=None):
    """out[n, g] = sum_f x[n, f] * weight[f, g] + bias[g]"""
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise DimensionError(f"dense shape mismatch: input {x.shape}, weight {weight.shape}")
    out = ops.matmul(x, weight)
    if bias is not None:
        if bias.shape != (weight.shape[1],):
            raise DimensionError(f"dense bias {bias.shape} does not match weight {weight.shape}")
        out = ops.add(out, bias)
    return out


def leaky_relu(x, slope=DEFAULT_SLOPE):
    """max(x, slope * x); the subgradient at exactly 0 is ``slope``"""
    if not 0.0 <= slope < 1.0:
        raise ValueError(f"leaky_relu slope must be in [0, 1), got {slope}")
    factor = Tensor(np.where(x.data > 0, 1.0, slope).astype(x.dtype))
    return ops.mul(x, factor)


def batch_norm(x, gamma, beta, eps=DEFAULT_EPS, training=True, running=None):
    """Normalize per channel over the batch and spatial axes.

    Training mode uses the biased batch variance and, when ``running`` is
    given, folds the batch statistics into it. Eval mode uses ``running``."""
    axes = (0,) + tuple(range(2, x.ndim))
    shape = _channel_shape(x)
    if training:
        if x.shape[0] < 2:
            raise ValueError(
                "batch_norm in training mode needs a batch of at least 2 samples "
                f"(variance is undefined for shape {x.shape})"
            )
        mean = ops.mean(x, axis=axes, keepdims=True)
        centered = ops.sub(x, mean)
        var = ops.mean(ops.mul(centered, centered), axis=axes, keepdims=True)
        if running is not None:
            running.update(mean.data.reshape(-1), var.data.reshape(-1))
        normalized = ops.div(centered, ops.sqrt(ops.add(var, eps)))
    else:
        if running is None:
            raise ValueError("batch_norm in eval mode needs running statistics")
        mean = Tensor(running.mean.reshape(shape), dtype=x.dtype)
        std = Tensor(np.sqrt(running.var.reshape(shape) + eps), dtype=x.dtype)
        normalized = ops.div(ops.sub(x, mean), std)
    return ops.add(ops.mul(normalized, ops.reshape(gamma, shape)), ops.reshape(beta, shape))


def layer_norm(x, gamma, beta, eps=DEFAULT_EPS):
    """Normalize each sample over all of its non-batch axes, then scale/shift per channel"""
    axes = tuple(range(1, x.ndim))
    shape = _channel_shape(x)
    mean = ops.mean(x, axis=axes, keepdims=True)
    centered = ops.sub(x, mean)
    var = ops.mean(ops.mul(centered, centered), axis=axes, keepdims=True)
    normalized = ops.div(centered, ops.sqrt(ops.add(var, eps)))
    return ops.add(ops.mul(normalized, ops.reshape(gamma, shape)), ops.reshape(beta, shape))


def dropout(x, rate, training, rng=None):
    """Inverted dropout: survivors are scaled by 1 / (1 - rate) so eval is the identity"""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in training mode needs a random generator")
    keep = rng.random(x.shape) >= rate
    return ops.mul(x, Tensor((keep / (1.0 - rate)).astype(x.dtype)))


def tanh(x):
    return ops.tanh(x)


def sigmoid(x):
    return ops.sigmoid(x)


def cross_entropy(logits, labels):
    """Mean softmax cross-entropy of [N, K] logits against integer labels"""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise DimensionError(f"cross_entropy expects [N, K] logits and N labels, got {logits.shape}, {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= logits.shape[1]:
        raise ValueError(f"labels must lie in [0, {logits.shape[1] - 1}]")
    shift = Tensor(logits.data.max(axis=1, keepdims=True))
    shifted = ops.sub(logits, shift)
    log_sum = ops.log(ops.sum(ops.exp(shifted), axis=1, keepdims=True))
    one_hot = np.zeros(logits.shape, dtype=logits.dtype)
    one_hot[np.arange(labels.shape[0]), labels] = 1.0
    picked = ops.sum(ops.mul(shifted, Tensor(one_hot)), axis=1, keepdims=True)
    return ops.mean(ops.sub(log_sum, picked))
