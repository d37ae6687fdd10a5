"""Grids of images (sample sheets) written as a single PGM"""

import math

import numpy as np

from ..common.utils import max_intensity
from .pgm import write_pgm

SEPARATOR = 2


def montage(images, cols=None, separator=SEPARATOR, bit_depth=8):
    """Tile equally sized 2-D images row by row; separators are drawn at full intensity"""
    images = [np.asarray(image) for image in images]
    if not images:
        raise ValueError("A montage needs at least one image")
    height, width = images[0].shape
    if any(image.shape != (height, width) for image in images):
        raise ValueError("All montage images must share one shape")
    cols = cols or math.ceil(math.sqrt(len(images)))
    rows = math.ceil(len(images) / cols)
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    sheet = np.full(
        (rows * height + (rows - 1) * separator, cols * width + (cols - 1) * separator),
        max_intensity(bit_depth),
        dtype=dtype,
    )
    for index, image in enumerate(images):
        row, col = divmod(index, cols)
        top = row * (height + separator)
        left = col * (width + separator)
        sheet[top : top + height, left : left + width] = image
    return sheet


def write_montage(path, images, cols=None, separator=SEPARATOR, bit_depth=8):
    sheet = montage(images, cols, separator, bit_depth)
    write_pgm(path, sheet)
    return sheet
