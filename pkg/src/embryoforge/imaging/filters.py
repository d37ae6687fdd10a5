"""Denoising and intensity range adjustment"""

import math

import numpy as np
from scipy import ndimage

from ..common.utils import max_intensity, round_half_away
from .stack import ImageStack, pixel_dtype


def median_filter_3d(stack, radius=1):
    """Replace every voxel by the median of its (2r+1)^3 neighbourhood.

    Coordinates are clamped at the borders (replicate padding). Works on an
    ImageStack or a bare [slices, y, x] array and returns the same kind."""
    if not isinstance(radius, (int, np.integer)) or radius < 1:
        raise ValueError(f"Median filter radius must be an integer >= 1, got {radius}")
    voxels = stack.voxels if isinstance(stack, ImageStack) else np.asarray(stack)
    if voxels.ndim != 3 or voxels.shape[0] < 1:
        raise ValueError(f"Median filter needs a stack with at least one slice, got shape {voxels.shape}")
    filtered = ndimage.median_filter(voxels, size=2 * int(radius) + 1, mode="nearest")
    if isinstance(stack, ImageStack):
        return stack.with_voxels(filtered)
    return filtered


def nearest_rank_percentile(values, percent):
    """Smallest value with at least ``percent`` % of the data at or below it"""
    ordered = np.sort(np.asarray(values).ravel())
    if ordered.size == 0:
        raise ValueError("Percentile of an empty image")
    rank = math.ceil(percent / 100.0 * ordered.size)
    rank = min(max(rank, 1), ordered.size)
    return ordered[rank - 1]


def adjust_brightness_range(img, p_low=1, p_high=99, bit_depth=8):
    """Stretch [percentile(p_low), percentile(p_high)] linearly onto the full range.

    Values outside the window are clamped, results rounded half away from
    zero. A constant image has no range to stretch and maps to zeros."""
    if not 0 <= p_low < p_high <= 100:
        raise ValueError(f"Percentiles must satisfy 0 <= p_low < p_high <= 100, got {p_low}, {p_high}")
    img = np.asarray(img)
    top = max_intensity(bit_depth)
    lo = float(nearest_rank_percentile(img, p_low))
    hi = float(nearest_rank_percentile(img, p_high))
    if hi <= lo:
        return np.zeros(img.shape, dtype=pixel_dtype(bit_depth))
    scaled = (img.astype(np.float64) - lo) * (top / (hi - lo))
    return round_half_away(np.clip(scaled, 0.0, top)).astype(pixel_dtype(bit_depth))


def adjust_stack_brightness(stack, p_low=1, p_high=99):
    """Brightness range adjustment applied to each slice on its own"""
    adjusted = np.stack(
        [adjust_brightness_range(plane, p_low, p_high, stack.bit_depth) for plane in stack.voxels]
    )
    return stack.with_voxels(adjusted)
