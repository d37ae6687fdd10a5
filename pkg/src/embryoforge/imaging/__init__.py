"""Preprocessing and augmentation of grayscale microscopy stacks"""

from .stack import BIT_DEPTHS, BoundingBox, ImageStack, Patch, pixel_dtype
from .filters import (
    adjust_brightness_range,
    adjust_stack_brightness,
    median_filter_3d,
    nearest_rank_percentile,
)
from .patches import extract_patches
from .augment import (
    AugmentConfig,
    AugmentParams,
    apply_augmentation,
    augment,
    denormalize_from_net,
    normalize_for_net,
    normalize_pixels,
    sample_augment_params,
)
