"""Finite-difference checks of every differentiable operation.

Each registered case builds random f64 inputs, differentiates a scalar
function of them with ``backward`` and compares against central differences.
Ops with non-scalar outputs are reduced with a fixed random projection.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import ops
from .conv import _conv_kernel_grad, conv2d, conv2d_transpose
from .functional import (
    RunningStats,
    batch_norm,
    cross_entropy,
    dense,
    dropout,
    layer_norm,
    leaky_relu,
)
from .tensor import Tensor, backward

FD_STEP = 1e-5
OP_TOLERANCE = 1e-5
DOUBLE_BACKPROP_TOLERANCE = 1e-4


def relative_error(analytic, numeric):
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))))


def numeric_gradient(fn, arrays, index, step=FD_STEP):
    """Central differences of scalar fn(*tensors) with respect to arrays[index]"""
    arrays = [np.array(a, dtype=np.float64) for a in arrays]
    target = arrays[index]
    grad = np.zeros_like(target)
    flat = target.reshape(-1)
    grad_flat = grad.reshape(-1)
    # Inputs are plain constants, so no graph is recorded unless fn builds one itself
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        plus = fn(*[Tensor(a, dtype="f64") for a in arrays]).item()
        flat[i] = original - step
        minus = fn(*[Tensor(a, dtype="f64") for a in arrays]).item()
        flat[i] = original
        grad_flat[i] = (plus - minus) / (2.0 * step)
    return grad


def analytic_gradients(fn, arrays):
    tensors = [Tensor(a, requires_grad=True, dtype="f64") for a in arrays]
    loss = fn(*tensors)
    grads = backward(loss, tensors)
    return [grads[t].data for t in tensors]


def check_gradients(fn, arrays, step=FD_STEP, indices=None):
    """Largest relative error between autodiff and finite differences.

    ``indices`` limits the check to some inputs (default: all of them)."""
    analytic = analytic_gradients(fn, arrays)
    if indices is None:
        indices = range(len(arrays))
    return max(relative_error(analytic[i], numeric_gradient(fn, arrays, i, step)) for i in indices)


def projected(op, projection_seed=1234):
    """Turn an op with any output shape into a scalar function"""

    def fn(*tensors):
        out = op(*tensors)
        weights = np.random.default_rng(projection_seed).standard_normal(out.shape)
        return ops.sum(ops.mul(out, Tensor(weights, dtype=out.dtype)))

    return fn


def _away_from(rng, shape, points, margin=1e-2, low=-2.0, high=2.0):
    # Uniform values that keep a margin from kinks such as 0 for leaky ReLU
    values = rng.uniform(low, high, size=shape)
    for point in points:
        close = np.abs(values - point) < margin
        values[close] = point + np.where(values[close] >= point, margin, -margin) * 2
    return values


@dataclass
class GradCase:
    name: str
    make_inputs: object
    fn: object
    tolerance: float = OP_TOLERANCE
    trials: int = None
    indices: tuple = None


@dataclass
class GradReport:
    name: str
    cases: int
    max_error: float
    tolerance: float
    seconds: float

    @property
    def passed(self):
        return self.max_error < self.tolerance


def _penalty_critic_gradient_norm(x, k1, k2, w):
    """||grad_x D(x)||^2 summed over the batch for a two-conv critic D"""
    x = Tensor(x.data, requires_grad=True, dtype=x.dtype)
    hidden = leaky_relu(conv2d(x, k1, stride=1, padding="half"))
    hidden = leaky_relu(conv2d(hidden, k2, stride=2, padding="half"))
    score = dense(ops.flatten(hidden), w)
    grad_x = backward(ops.sum(score), [x], higher_order=True)[x]
    return ops.sum(ops.mul(grad_x, grad_x))


def _double_backprop(x, k1, k2, w):
    # Only the critic parameters are differentiated; x is a fixed data point
    return _penalty_critic_gradient_norm(Tensor(x.data, dtype=x.dtype), k1, k2, w)


def _gradient_penalty(real, fake, k1, k2, w):
    """The training penalty of a two-conv critic on 4x4 inputs, as a function of its weights"""
    # Imported here: the critic and the penalty are built on top of this package
    from ..gan.losses import gradient_penalty
    from ..models.layers import LayerSpec
    from ..models.network import Network
    from ..nn.params import ParamSet

    specs = [
        LayerSpec("conv", name="conv1", in_channels=1, out_channels=3, kernel=3, stride=1, bias=False),
        LayerSpec("leaky_relu", name="act1"),
        LayerSpec("conv", name="conv2", in_channels=3, out_channels=2, kernel=4, stride=2, bias=False),
        LayerSpec("leaky_relu", name="act2"),
        LayerSpec("flatten", name="flatten"),
        LayerSpec("dense", name="fc", in_features=8, out_features=1, bias=False),
    ]
    params = ParamSet([("conv1.kernel", k1), ("conv2.kernel", k2), ("fc.weight", w)])
    critic = Network(specs, (1, 4, 4), params=params, dtype="f64", kind="critic")
    # Same interpolation weights on every evaluation
    return gradient_penalty(critic, real.data, fake.data, 10.0, np.random.default_rng(7))


def _batch_norm_case(x, gamma, beta):
    return batch_norm(x, gamma, beta, training=True, running=RunningStats(x.shape[1], dtype=x.dtype))


def _dropout_case(x):
    return dropout(x, 0.3, training=True, rng=np.random.default_rng(99))


def registered_cases():
    """One case per differentiable operation"""
    pos = lambda rng, shape: rng.uniform(0.5, 2.0, size=shape)  # noqa: E731
    std = lambda rng, shape: rng.standard_normal(shape)  # noqa: E731
    return [
        GradCase("add", lambda r: [std(r, (3, 4)), std(r, (4,))], projected(ops.add)),
        GradCase("sub", lambda r: [std(r, (3, 1)), std(r, (3, 4))], projected(ops.sub)),
        GradCase("mul", lambda r: [std(r, (2, 3)), std(r, (2, 3))], projected(ops.mul)),
        GradCase("div", lambda r: [std(r, (2, 3)), pos(r, (2, 3))], projected(ops.div)),
        GradCase("neg", lambda r: [std(r, (5,))], projected(ops.neg)),
        GradCase("power", lambda r: [pos(r, (4,))], projected(lambda a: ops.power(a, 3.0))),
        GradCase("matmul", lambda r: [std(r, (3, 5)), std(r, (5, 2))], projected(ops.matmul)),
        GradCase("exp", lambda r: [std(r, (4,))], projected(ops.exp)),
        GradCase("log", lambda r: [pos(r, (4,))], projected(ops.log)),
        GradCase("sqrt", lambda r: [pos(r, (4,))], projected(ops.sqrt)),
        GradCase("tanh", lambda r: [std(r, (4,))], projected(ops.tanh)),
        GradCase("sigmoid", lambda r: [std(r, (4,))], projected(ops.sigmoid)),
        GradCase(
            "clip",
            lambda r: [_away_from(r, (6,), [-1.0, 1.0])],
            projected(lambda a: ops.clip(a, -1.0, 1.0)),
        ),
        GradCase("sum", lambda r: [std(r, (2, 3, 4))], projected(lambda a: ops.sum(a, axis=(0, 2)))),
        GradCase("mean", lambda r: [std(r, (2, 3, 4))], projected(lambda a: ops.mean(a, axis=1, keepdims=True))),
        GradCase("reshape", lambda r: [std(r, (2, 6))], projected(lambda a: ops.reshape(a, (3, 4)))),
        GradCase("transpose", lambda r: [std(r, (2, 3, 4))], projected(lambda a: ops.transpose(a, (2, 0, 1)))),
        GradCase("broadcast_to", lambda r: [std(r, (3, 1))], projected(lambda a: ops.broadcast_to(a, (2, 3, 4)))),
        GradCase("sum_to", lambda r: [std(r, (2, 3, 4))], projected(lambda a: ops.sum_to(a, (3, 1)))),
        GradCase("dense", lambda r: [std(r, (3, 5)), std(r, (5, 2)), std(r, (2,))], projected(dense)),
        GradCase(
            "conv2d",
            lambda r: [std(r, (2, 3, 6, 6)), std(r, (4, 3, 4, 4))],
            projected(lambda x, k: conv2d(x, k, stride=2, padding="half")),
        ),
        GradCase(
            "conv2d_transpose",
            lambda r: [std(r, (2, 3, 3, 3)), std(r, (3, 2, 4, 4))],
            projected(lambda y, k: conv2d_transpose(y, k, stride=2)),
        ),
        GradCase(
            "conv2d_kernel_grad",
            lambda r: [std(r, (2, 2, 5, 5)), std(r, (2, 3, 3, 3))],
            projected(lambda x, y: _conv_kernel_grad(x, y, 2, 1, 1, 3, 3)),
        ),
        GradCase("leaky_relu", lambda r: [_away_from(r, (3, 4), [0.0])], projected(leaky_relu)),
        GradCase(
            "batch_norm",
            lambda r: [std(r, (4, 3, 2, 2)), pos(r, (3,)), std(r, (3,))],
            projected(_batch_norm_case),
        ),
        GradCase(
            "layer_norm",
            lambda r: [std(r, (3, 2, 2, 2)), pos(r, (2,)), std(r, (2,))],
            projected(layer_norm),
        ),
        GradCase("dropout", lambda r: [std(r, (4, 5))], projected(_dropout_case)),
        GradCase(
            "cross_entropy",
            lambda r: [std(r, (4, 3))],
            lambda logits: cross_entropy(logits, np.array([0, 2, 1, 2])),
        ),
        GradCase(
            "double_backprop",
            lambda r: [
                std(r, (2, 1, 4, 4)),
                std(r, (3, 1, 3, 3)) * 0.5,
                std(r, (2, 3, 4, 4)) * 0.5,
                std(r, (8, 1)) * 0.5,
            ],
            _double_backprop,
            tolerance=DOUBLE_BACKPROP_TOLERANCE,
            trials=5,
            indices=(1, 2, 3),
        ),
        GradCase(
            "gradient_penalty",
            lambda r: [
                std(r, (3, 1, 4, 4)),
                std(r, (3, 1, 4, 4)),
                std(r, (3, 1, 3, 3)) * 0.5,
                std(r, (2, 3, 4, 4)) * 0.5,
                std(r, (8, 1)) * 0.5,
            ],
            _gradient_penalty,
            tolerance=DOUBLE_BACKPROP_TOLERANCE,
            trials=5,
            indices=(2, 3, 4),
        ),
    ]


def run_case(case, trials=20, seed=0):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    count = case.trials or trials
    worst = 0.0
    for _ in range(count):
        worst = max(worst, check_gradients(case.fn, case.make_inputs(rng), indices=case.indices))
    return GradReport(case.name, count, worst, case.tolerance, time.perf_counter() - start)


def run_suite(trials=20, seed=0, names=None):
    reports = []
    for case in registered_cases():
        if names and case.name not in names:
            continue
        reports.append(run_case(case, trials=trials, seed=seed))
    return reports
