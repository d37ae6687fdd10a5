"""Finite-difference checks of every differentiable op, including double backprop"""

import sys

import numpy as np
import pytest

sys.path.append("src")

from embryoforge.tensor import Tensor, backward, ops  # pylint: disable=wrong-import-position
from embryoforge.tensor.gradcheck import (  # pylint: disable=wrong-import-position
    OP_TOLERANCE,
    check_gradients,
    numeric_gradient,
    registered_cases,
    run_suite,
)


def test_every_op_is_registered_once():
    """The suite lists each differentiable op exactly once"""
    names = [case.name for case in registered_cases()]
    assert len(names) == len(set(names))
    for expected in (
        "add",
        "mul",
        "matmul",
        "conv2d",
        "conv2d_transpose",
        "dense",
        "leaky_relu",
        "batch_norm",
        "layer_norm",
        "dropout",
        "cross_entropy",
        "double_backprop",
        "gradient_penalty",
    ):
        assert expected in names


def test_numeric_gradient_of_square():
    """Central differences of sum(x^2) give 2x"""

    def fn(x):
        return ops.sum(ops.mul(x, x))

    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(numeric_gradient(fn, [x], 0), 2.0 * x, atol=1e-8)


def test_check_gradients_composed_network():
    """A small composed function passes the relative error bound"""
    rng = np.random.default_rng(0)

    def fn(x, w):
        return ops.sum(ops.tanh(ops.matmul(x, w)))

    error = check_gradients(fn, [rng.standard_normal((3, 4)), rng.standard_normal((4, 2))])
    assert error < OP_TOLERANCE


def test_quick_suite_passes():
    """Three random cases per op already stay under every tolerance"""
    reports = run_suite(trials=3, seed=1)
    failed = [(r.name, r.max_error) for r in reports if not r.passed]
    assert not failed


def test_suite_subset():
    """Selecting op names runs only those"""
    reports = run_suite(trials=2, seed=0, names=["add", "exp"])
    assert [r.name for r in reports] == ["add", "exp"]


def test_penalty_style_double_backprop_by_hand():
    """d/dw of ||d/dx (w . x)^2||^2 matches the analytic 8 (w . x)^2 x ... reduced to 1-D"""
    # f(x) = (w x)^2 -> df/dx = 2 w^2 x -> g = (2 w^2 x)^2 = 4 w^4 x^2 -> dg/dw = 16 w^3 x^2
    w = Tensor(np.array([1.5]), requires_grad=True, dtype="f64")
    x = Tensor(np.array([0.7]), requires_grad=True, dtype="f64")
    f = ops.sum(ops.power(ops.mul(w, x), 2.0))
    gx = backward(f, [x], higher_order=True)[x]
    g = ops.sum(ops.mul(gx, gx))
    dw = backward(g, [w])[w]
    np.testing.assert_allclose(dw.data, 16 * 1.5**3 * 0.7**2, rtol=1e-12)


@pytest.mark.slow
def test_full_suite():
    """Twenty cases per op (five for the double-backprop cases), all within tolerance, under a minute"""
    reports = run_suite(trials=20, seed=0)
    for report in reports:
        assert report.passed, f"{report.name}: {report.max_error:.3e} >= {report.tolerance}"
        if report.name not in ("double_backprop", "gradient_penalty"):
            assert report.cases >= 20
    assert sum(report.seconds for report in reports) < 60
