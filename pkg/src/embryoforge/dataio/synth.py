"""Synthetic membrane-like microscopy data.

Cells are Voronoi regions of random seed points; their walls are drawn as
bright ridges where the distances to the two nearest seeds are close. A raw
stack adds an elliptical embryo outline, a slow drift of the seeds from
slice to slice and shot noise. The labeled variant produces small patches
that either centre on a rosette (several walls meeting at one vertex) or do
not.
"""

import os

import numpy as np
from scipy.spatial import cKDTree

from ..common.log import log
from ..common.rng import derive_seed
from ..common.utils import ensure_directory, max_intensity
from ..imaging.stack import BoundingBox, ImageStack, Patch, pixel_dtype
from .manifest import ManifestEntry, write_manifest
from .pgm import write_pgm

FIRST_TIME_MIN = 61
BACKGROUND = 0.08
WALL = 0.9
NOISE_GAIN = 60.0


def _grid(height, width):
    ys, xs = np.mgrid[0:height, 0:width]
    return np.column_stack([xs.ravel() + 0.5, ys.ravel() + 0.5])


def render_walls(seeds, height, width, wall_width):
    """Wall strength in [0, 1] for every pixel of a Voronoi diagram"""
    if len(seeds) < 2:
        return np.zeros((height, width))
    distances, _ = cKDTree(seeds).query(_grid(height, width), k=2)
    gap = (distances[:, 1] - distances[:, 0]) / wall_width
    return np.exp(-(gap**2)).reshape(height, width)


def _to_pixels(intensity, rng, bit_depth):
    """Map [0, 1] intensity to integers with Poisson shot noise"""
    top = max_intensity(bit_depth)
    noisy = rng.poisson(np.clip(intensity, 0.0, 1.0) * NOISE_GAIN) / NOISE_GAIN
    return np.clip(np.rint(noisy * top), 0, top).astype(pixel_dtype(bit_depth))


def synth_stack(rng, size=128, n_slices=30, bit_depth=8, embryo_id="", time_min=0, n_cells=None):
    """One raw stack and the bounding box of its embryo"""
    n_cells = n_cells or max(8, size // 8)
    center = np.array([size / 2.0, size / 2.0]) + rng.uniform(-0.05, 0.05, 2) * size
    axes = np.array([rng.uniform(0.32, 0.42), rng.uniform(0.22, 0.3)]) * size
    angle = rng.uniform(0.0, np.pi)

    # Seeds uniform inside the ellipse
    radius = np.sqrt(rng.uniform(0.0, 1.0, n_cells))
    theta = rng.uniform(0.0, 2.0 * np.pi, n_cells)
    local = np.column_stack([radius * np.cos(theta) * axes[0], radius * np.sin(theta) * axes[1]])
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    seeds = local @ rotation.T + center
    drift = rng.normal(0.0, 0.004 * size, (n_cells, 2))

    grid = _grid(size, size) - center
    rotated = grid @ rotation
    ellipse = np.sqrt((rotated[:, 0] / axes[0]) ** 2 + (rotated[:, 1] / axes[1]) ** 2).reshape(size, size)
    outline = np.exp(-(((ellipse - 1.0) * min(axes) / 1.5) ** 2))
    inside = ellipse < 1.0

    wall_width = max(0.8, size / 128.0)
    slices = []
    for index in range(n_slices):
        walls = render_walls(seeds + drift * index, size, size, wall_width) * inside
        intensity = BACKGROUND + (WALL - BACKGROUND) * np.maximum(walls, outline)
        slices.append(_to_pixels(intensity, rng, bit_depth))

    # Bounding box of the ellipse, clipped to the frame
    extent = np.sqrt((axes[0] * np.cos(angle)) ** 2 + (axes[1] * np.sin(angle)) ** 2), np.sqrt(
        (axes[0] * np.sin(angle)) ** 2 + (axes[1] * np.cos(angle)) ** 2
    )
    x0 = max(0, int(np.floor(center[0] - extent[0])))
    y0 = max(0, int(np.floor(center[1] - extent[1])))
    x1 = min(size, int(np.ceil(center[0] + extent[0])))
    y1 = min(size, int(np.ceil(center[1] + extent[1])))
    stack = ImageStack(np.stack(slices), bit_depth=bit_depth, embryo_id=embryo_id, time_min=time_min)
    return stack, BoundingBox(x0, y0, x1 - x0, y1 - y0)


def stack_to_image(stack):
    """Slices concatenated along y: the on-disk form of a raw stack"""
    return stack.voxels.reshape(stack.n_slices * stack.height, stack.width)


def image_to_stack(image, n_slices, bit_depth=8, embryo_id="", time_min=0):
    image = np.asarray(image)
    if n_slices < 1 or image.shape[0] % n_slices:
        raise ValueError(f"Image height {image.shape[0]} is not a multiple of {n_slices} slices")
    voxels = image.reshape(n_slices, image.shape[0] // n_slices, image.shape[1])
    return ImageStack(voxels, bit_depth=bit_depth, embryo_id=embryo_id, time_min=time_min)


def synth_corpus(n_embryos, stacks_per, size, rng, n_slices=30, bit_depth=8, out_dir=None, n_cells=None):
    """Raw stacks for ``n_embryos`` embryos imaged ``stacks_per`` times, one minute apart.

    Every stack gets its own seed derived from one draw of ``rng``, recorded
    as ``seed_used``. With ``out_dir`` the stacks are written as PGM files
    together with ``manifest.jsonl``. Returns (stacks, manifest entries)."""
    base_seed = int(rng.integers(0, 2**63))
    if out_dir:
        ensure_directory(os.path.join(out_dir, "stacks"))
    stacks = []
    entries = []
    for embryo in range(n_embryos):
        embryo_id = f"embryo{embryo:03d}"
        for index in range(stacks_per):
            seed = derive_seed(base_seed, embryo, index)
            time_min = FIRST_TIME_MIN + index
            stack, bbox = synth_stack(
                np.random.default_rng(seed),
                size=size,
                n_slices=n_slices,
                bit_depth=bit_depth,
                embryo_id=embryo_id,
                time_min=time_min,
                n_cells=n_cells,
            )
            path = f"stacks/{embryo_id}_t{time_min:04d}.pgm"
            if out_dir:
                write_pgm(os.path.join(out_dir, path), stack_to_image(stack))
            stacks.append(stack)
            entries.append(
                ManifestEntry(
                    path=path,
                    role="raw_stack",
                    embryo_id=embryo_id,
                    time_min=time_min,
                    bbox=bbox.to_list(),
                    seed_used=seed,
                    n_slices=n_slices,
                )
            )
        log.debug("Synthesized %d stacks for %s", stacks_per, embryo_id)
    if out_dir:
        write_manifest(os.path.join(out_dir, "manifest.jsonl"), entries)
    return stacks, entries


def _rosette_seeds(rng, size):
    k = int(rng.integers(5, 8))
    radius = rng.uniform(0.28, 0.36) * size
    phase = rng.uniform(0.0, 2.0 * np.pi)
    angles = phase + 2.0 * np.pi * np.arange(k) / k + rng.uniform(-0.08, 0.08, k)
    center = size / 2.0 + rng.uniform(-0.5, 0.5, 2)
    ring = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    outer = _outer_seeds(rng, size, 2.0 * radius, center)
    return np.vstack([ring, outer])


def _plain_seeds(rng, size):
    # One cell sits on the centre so no vertex lands there
    center = size / 2.0 + rng.uniform(-0.1, 0.1, 2) * size
    count = int(rng.integers(4, 8))
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    distance = rng.uniform(0.45, 0.9, count) * size
    others = center + distance[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    return np.vstack([center[None], others, _outer_seeds(rng, size, 1.2 * size, center)])


def _outer_seeds(rng, size, min_distance, center):
    count = int(rng.integers(4, 9))
    angles = rng.uniform(0.0, 2.0 * np.pi, count)
    distance = min_distance + rng.uniform(0.0, 0.6 * size, count)
    return center + distance[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])


def synth_labeled_patch(rng, size, rosette, bit_depth=8):
    seeds = _rosette_seeds(rng, size) if rosette else _plain_seeds(rng, size)
    walls = render_walls(seeds, size, size, max(0.8, size / 24.0))
    return _to_pixels(BACKGROUND + (WALL - BACKGROUND) * walls, rng, bit_depth)


def synth_labeled_patches(n, size, rng, bit_depth=8):
    """``n`` patches, exactly half (rounded down) rosettes (label 1), in shuffled order"""
    from .patchset import PatchSet

    labels = np.zeros(n, dtype=np.int64)
    labels[: n // 2] = 1
    rng.shuffle(labels)
    patches = [
        Patch(
            pixels=synth_labeled_patch(rng, size, bool(label), bit_depth),
            bit_depth=bit_depth,
            embryo_id="synthetic",
            label=int(label),
        )
        for label in labels
    ]
    return PatchSet.from_patches(patches)
