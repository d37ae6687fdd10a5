"""Classical augmentations and the network input scaling"""

from dataclasses import dataclass, fields

import numpy as np

from ..common.utils import max_intensity, round_half_away
from ..tensor import Tensor
from .stack import Patch


@dataclass
class AugmentConfig:
    flip_vertical: bool = True
    flip_horizontal: bool = True
    # Fraction of the intensity range
    brightness_delta: float = 0.1
    contrast_delta: float = 0.2

    def __post_init__(self):
        if self.brightness_delta < 0 or not 0 <= self.contrast_delta < 1:
            raise ValueError("brightness_delta must be >= 0 and contrast_delta in [0, 1)")

    @classmethod
    def disabled(cls):
        return cls(False, False, 0.0, 0.0)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in (data or {}).items() if key in known})


@dataclass
class AugmentParams:
    flip_vertical: bool = False
    flip_horizontal: bool = False
    brightness: float = 0.0
    contrast: float = 1.0


def sample_augment_params(rng, cfg, bit_depth=8):
    """Draw one set of augmentation parameters.

    All four values are always drawn, so disabling one augmentation does not
    shift the draws of the others."""
    flip_v = rng.random() < 0.5
    flip_h = rng.random() < 0.5
    brightness = rng.uniform(-1.0, 1.0) * cfg.brightness_delta * max_intensity(bit_depth)
    contrast = 1.0 + rng.uniform(-1.0, 1.0) * cfg.contrast_delta
    return AugmentParams(
        flip_vertical=bool(flip_v and cfg.flip_vertical),
        flip_horizontal=bool(flip_h and cfg.flip_horizontal),
        brightness=float(brightness),
        contrast=float(contrast),
    )


def apply_augmentation(pixels, params, bit_depth=8):
    """Flip, then scale contrast about the mean, then shift brightness; clamp to range"""
    pixels = np.asarray(pixels)
    out = pixels
    if params.flip_vertical:
        out = out[::-1, :]
    if params.flip_horizontal:
        out = out[:, ::-1]
    if params.contrast == 1.0 and params.brightness == 0.0:
        return np.ascontiguousarray(out)
    values = out.astype(np.float64)
    if params.contrast != 1.0:
        mean = values.mean()
        values = mean + (values - mean) * params.contrast
    values = values + params.brightness
    values = np.clip(round_half_away(values), 0, max_intensity(bit_depth))
    return values.astype(pixels.dtype)


def augment(patch, rng, cfg):
    params = sample_augment_params(rng, cfg, patch.bit_depth)
    return patch.with_pixels(apply_augmentation(patch.pixels, params, patch.bit_depth))


def normalize_pixels(pixels, bit_depth=8, dtype=np.float32):
    """[0, 2^bit_depth - 1] -> [-1, 1], elementwise"""
    top = float(max_intensity(bit_depth))
    return (np.asarray(pixels, dtype=np.float64) * (2.0 / top) - 1.0).astype(dtype)


def normalize_for_net(patch, dtype="f32"):
    """Patch -> Tensor [1, H, W] in [-1, 1]"""
    if isinstance(patch, Patch):
        pixels, bit_depth = patch.pixels, patch.bit_depth
    else:
        pixels, bit_depth = patch, 8
    return Tensor(normalize_pixels(pixels, bit_depth, np.float64)[None], dtype=dtype)


def denormalize_from_net(values, bit_depth=8):
    """Inverse of the input scaling, rounded half away from zero and clamped"""
    if isinstance(values, Tensor):
        values = values.data
    top = max_intensity(bit_depth)
    scaled = (np.asarray(values, dtype=np.float64) + 1.0) * (top / 2.0)
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    return np.clip(round_half_away(scaled), 0, top).astype(dtype)
