"""Grayscale image stacks, patches and bounding boxes"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..common.utils import max_intensity

BIT_DEPTHS = (8, 16)


def pixel_dtype(bit_depth):
    if bit_depth not in BIT_DEPTHS:
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    return np.uint8 if bit_depth == 8 else np.uint16


def _check_range(array, bit_depth, what):
    if array.size and (array.min() < 0 or array.max() > max_intensity(bit_depth)):
        raise ValueError(f"{what} has values outside [0, {max_intensity(bit_depth)}] for {bit_depth}-bit data")


@dataclass
class ImageStack:
    """A pseudo-3D volume stored row-major as [slice][y][x]"""

    voxels: np.ndarray
    bit_depth: int = 8
    embryo_id: str = ""
    time_min: int = 0

    def __post_init__(self):
        voxels = np.asarray(self.voxels)
        if voxels.ndim != 3:
            raise ValueError(f"An image stack needs [slices, height, width] voxels, got shape {voxels.shape}")
        _check_range(voxels, self.bit_depth, f"Stack {self.embryo_id or '<unnamed>'}")
        self.voxels = voxels.astype(pixel_dtype(self.bit_depth), copy=False)

    @property
    def n_slices(self):
        return self.voxels.shape[0]

    @property
    def height(self):
        return self.voxels.shape[1]

    @property
    def width(self):
        return self.voxels.shape[2]

    def slice(self, index):
        return self.voxels[index]

    def with_voxels(self, voxels):
        return replace(self, voxels=voxels)


@dataclass
class Patch:
    pixels: np.ndarray
    bit_depth: int = 8
    embryo_id: str = ""
    time_min: int = 0
    slice_index: int = 0
    origin_x: int = 0
    origin_y: int = 0
    label: Optional[int] = None

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise ValueError(f"A patch is a 2-D image, got shape {pixels.shape}")
        _check_range(pixels, self.bit_depth, "Patch")
        self.pixels = pixels.astype(pixel_dtype(self.bit_depth), copy=False)

    @property
    def size(self):
        return self.pixels.shape[0]

    def with_pixels(self, pixels):
        return replace(self, pixels=pixels)


@dataclass(frozen=True)
class BoundingBox:
    x: int
    y: int
    w: int
    h: int

    @classmethod
    def from_value(cls, value):
        """Accept [x, y, w, h], {"x": .., "y": .., "w": .., "h": ..} or a BoundingBox"""
        if isinstance(value, BoundingBox):
            return value
        if value is None:
            raise ValueError("Missing bounding box")
        if isinstance(value, dict):
            return cls(int(value["x"]), int(value["y"]), int(value["w"]), int(value["h"]))
        if len(value) != 4:
            raise ValueError(f"A bounding box has four values x, y, w, h; got {value}")
        return cls(*(int(v) for v in value))

    def to_list(self):
        return [self.x, self.y, self.w, self.h]

    def fits(self, patch_size):
        return self.w >= patch_size and self.h >= patch_size

    def inside(self, width, height):
        return self.x >= 0 and self.y >= 0 and self.x + self.w <= width and self.y + self.h <= height

    def __str__(self):
        return f"(x={self.x}, y={self.y}, w={self.w}, h={self.h})"
