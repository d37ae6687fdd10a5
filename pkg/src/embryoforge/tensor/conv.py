"""Strided 2-D convolution and its adjoints.

Three bilinear primitives share one (stride, padding) geometry:

    conv2d(x, k)              x: [N, Ci, H, W], k: [Co, Ci, kH, kW] -> [N, Co, H', W']
    conv2d_input_grad(y, k)   adjoint in x:      y: [N, Co, H', W'] -> [N, Ci, H, W]
    conv2d_kernel_grad(x, y)  adjoint in k:      -> [Co, Ci, kH, kW]

The derivative of each one is a combination of the other two, so the set is
closed under differentiation to any order.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..common.errors import DimensionError
from .tensor import make_result

PADDING_MODES = ("valid", "half")


def padding_amount(kernel_size, padding):
    """Pixels added on each side. ``half`` is (k - 1) // 2, so 1 for 4x4 kernels"""
    if padding == "valid":
        return 0
    if padding == "half":
        return (kernel_size - 1) // 2
    if isinstance(padding, int) and padding >= 0:
        return padding
    raise ValueError(f"Unknown padding '{padding}', expected one of {PADDING_MODES}")


def output_size(size, kernel_size, stride, pad):
    return (size + 2 * pad - kernel_size) // stride + 1


def _windows(padded, kh, kw, stride, out_h, out_w):
    view = sliding_window_view(padded, (kh, kw), axis=(2, 3))
    return view[:, :, : (out_h - 1) * stride + 1 : stride, : (out_w - 1) * stride + 1 : stride]


def _pad(x, ph, pw):
    if ph == 0 and pw == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))


def conv2d_forward(x, k, stride, ph, pw):
    kh, kw = k.shape[2:]
    out_h = output_size(x.shape[2], kh, stride, ph)
    out_w = output_size(x.shape[3], kw, stride, pw)
    windows = _windows(_pad(x, ph, pw), kh, kw, stride, out_h, out_w)
    return np.einsum("nchwij,ocij->nohw", windows, k, optimize=True)


def conv2d_kernel_grad_forward(x, y, stride, ph, pw, kh, kw):
    out_h, out_w = y.shape[2:]
    windows = _windows(_pad(x, ph, pw), kh, kw, stride, out_h, out_w)
    return np.einsum("nchwij,nohw->ocij", windows, y, optimize=True)


def conv2d_input_grad_forward(y, k, stride, ph, pw, in_h, in_w):
    n = y.shape[0]
    kh, kw = k.shape[2:]
    out_h, out_w = y.shape[2:]
    cols = np.einsum("nohw,ocij->nchwij", y, k, optimize=True)
    padded = np.zeros((n, k.shape[1], in_h + 2 * ph, in_w + 2 * pw), dtype=np.result_type(y, k))
    # Fixed loop order keeps the accumulation deterministic
    for i in range(kh):
        for j in range(kw):
            padded[:, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride] += cols[
                :, :, :, :, i, j
            ]
    return padded[:, :, ph : ph + in_h, pw : pw + in_w]


# -- differentiable wrappers ------------------------------------------------------


def _conv(x, k, stride, ph, pw):
    def rule(g, out):
        return (
            _conv_input_grad(g, k, stride, ph, pw, x.shape[2], x.shape[3]) if x.requires_grad else None,
            _conv_kernel_grad(x, g, stride, ph, pw, k.shape[2], k.shape[3]) if k.requires_grad else None,
        )

    return make_result(
        conv2d_forward(x.data, k.data, stride, ph, pw),
        "conv2d",
        (x, k),
        rule,
        saved={"stride": stride, "padding": (ph, pw)},
    )


def _conv_input_grad(y, k, stride, ph, pw, in_h, in_w):
    def rule(g, out):
        return (
            _conv(g, k, stride, ph, pw) if y.requires_grad else None,
            _conv_kernel_grad(g, y, stride, ph, pw, k.shape[2], k.shape[3]) if k.requires_grad else None,
        )

    return make_result(
        conv2d_input_grad_forward(y.data, k.data, stride, ph, pw, in_h, in_w),
        "conv2d_transpose",
        (y, k),
        rule,
        saved={"stride": stride, "padding": (ph, pw)},
    )


def _conv_kernel_grad(x, y, stride, ph, pw, kh, kw):
    def rule(g, out):
        return (
            _conv_input_grad(y, g, stride, ph, pw, x.shape[2], x.shape[3]) if x.requires_grad else None,
            _conv(x, g, stride, ph, pw) if y.requires_grad else None,
        )

    return make_result(
        conv2d_kernel_grad_forward(x.data, y.data, stride, ph, pw, kh, kw),
        "conv2d_kernel_grad",
        (x, y),
        rule,
        saved={"stride": stride, "padding": (ph, pw)},
    )


# -- public operations ------------------------------------------------------------


def conv2d(x, kernel, stride=1, padding="valid"):
    """Cross-correlate a batch of images with a kernel bank"""
    if x.ndim != 4 or kernel.ndim != 4:
        raise DimensionError(f"conv2d expects 4-D input and kernel, got {x.shape} and {kernel.shape}")
    if x.shape[1] != kernel.shape[1]:
        raise DimensionError(
            f"conv2d channel mismatch: input {x.shape} has {x.shape[1]} channels, "
            f"kernel {kernel.shape} expects {kernel.shape[1]}"
        )
    if stride < 1:
        raise ValueError(f"conv2d stride must be >= 1, got {stride}")
    kh, kw = kernel.shape[2:]
    ph, pw = padding_amount(kh, padding), padding_amount(kw, padding)
    if kh > x.shape[2] + 2 * ph or kw > x.shape[3] + 2 * pw:
        raise DimensionError(
            f"conv2d kernel {kernel.shape} is larger than the padded input {x.shape} (padding {padding})"
        )
    return _conv(x, kernel, int(stride), ph, pw)


def conv2d_transpose(x, kernel, stride=2, padding="half", output_size_hw=None):
    """Adjoint of conv2d: kernel is [C_in, C_out, kH, kW] and spatial size grows by ``stride``"""
    if x.ndim != 4 or kernel.ndim != 4:
        raise DimensionError(
            f"conv2d_transpose expects 4-D input and kernel, got {x.shape} and {kernel.shape}"
        )
    if x.shape[1] != kernel.shape[0]:
        raise DimensionError(
            f"conv2d_transpose channel mismatch: input {x.shape} has {x.shape[1]} channels, "
            f"kernel {kernel.shape} expects {kernel.shape[0]}"
        )
    if stride < 1:
        raise ValueError(f"conv2d_transpose stride must be >= 1, got {stride}")
    kh, kw = kernel.shape[2:]
    ph, pw = padding_amount(kh, padding), padding_amount(kw, padding)
    if output_size_hw is None:
        output_size_hw = (x.shape[2] * stride, x.shape[3] * stride)
    out_h, out_w = output_size_hw
    if (
        output_size(out_h, kh, stride, ph) != x.shape[2]
        or output_size(out_w, kw, stride, pw) != x.shape[3]
    ):
        raise DimensionError(
            f"conv2d_transpose cannot map {x.shape} to spatial size {output_size_hw} "
            f"with kernel {kernel.shape}, stride {stride}, padding {padding}"
        )
    return _conv_input_grad(x, kernel, int(stride), ph, pw, out_h, out_w)
