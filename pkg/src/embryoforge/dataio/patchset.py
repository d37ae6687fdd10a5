"""In-memory collections of equally sized patches"""

import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..common.errors import InputError
from ..common.utils import ensure_directory
from ..imaging.augment import normalize_pixels
from ..imaging.stack import Patch, pixel_dtype
from .manifest import ManifestEntry, read_manifest, resolve_path, write_manifest
from .pgm import read_pgm, write_pgm


@dataclass
class PatchSet:
    """Pixels [N, H, W], their bit depth, optional integer labels and provenance"""

    pixels: np.ndarray
    bit_depth: int = 8
    labels: Optional[np.ndarray] = None
    provenance: List[dict] = field(default_factory=list)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 3:
            raise ValueError(f"A patch set holds [N, H, W] pixels, got shape {self.pixels.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (len(self.pixels),):
                raise ValueError(f"{len(self.labels)} labels for {len(self.pixels)} patches")

    def __len__(self):
        return len(self.pixels)

    @property
    def size(self):
        return self.pixels.shape[1]

    @property
    def labeled(self):
        return self.labels is not None

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1 if self.labeled and len(self.labels) else 0

    def normalized(self, dtype=np.float32):
        """Network input [N, 1, H, W] in [-1, 1]"""
        return normalize_pixels(self.pixels, self.bit_depth, dtype)[:, None]

    def mean_intensity(self):
        return float(self.pixels.mean())

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return PatchSet(
            pixels=self.pixels[indices],
            bit_depth=self.bit_depth,
            labels=None if self.labels is None else self.labels[indices],
            provenance=[self.provenance[i] for i in indices] if self.provenance else [],
        )

    def split(self, n_first):
        """(first n_first patches, the rest)"""
        return self.subset(range(n_first)), self.subset(range(n_first, len(self)))

    def patch(self, index):
        meta = self.provenance[index] if self.provenance else {}
        return Patch(
            pixels=self.pixels[index],
            bit_depth=self.bit_depth,
            label=None if self.labels is None else int(self.labels[index]),
            **{key: meta[key] for key in ("embryo_id", "time_min", "slice_index", "origin_x", "origin_y") if key in meta},
        )

    @classmethod
    def from_patches(cls, patches):
        patches = list(patches)
        if not patches:
            raise ValueError("Cannot build a patch set from zero patches")
        bit_depth = patches[0].bit_depth
        shape = patches[0].pixels.shape
        for patch in patches:
            if patch.pixels.shape != shape or patch.bit_depth != bit_depth:
                raise ValueError("All patches of a set must share one size and bit depth")
        labels = [patch.label for patch in patches]
        has_labels = all(label is not None for label in labels)
        return cls(
            pixels=np.stack([patch.pixels for patch in patches]).astype(pixel_dtype(bit_depth)),
            bit_depth=bit_depth,
            labels=np.array(labels, dtype=np.int64) if has_labels else None,
            provenance=[
                {
                    "embryo_id": patch.embryo_id,
                    "time_min": patch.time_min,
                    "slice_index": patch.slice_index,
                    "origin_x": patch.origin_x,
                    "origin_y": patch.origin_y,
                }
                for patch in patches
            ],
        )


def load_patch_set(manifest_path):
    """Read every "patch" entry of a manifest into one PatchSet"""
    entries = [entry for entry in read_manifest(manifest_path) if entry.role == "patch"]
    if not entries:
        raise InputError(f"Manifest {manifest_path} lists no patches")
    patches = []
    for entry in entries:
        pixels = read_pgm(resolve_path(manifest_path, entry))
        bit_depth = 8 if pixels.dtype == np.uint8 else 16
        patches.append(
            Patch(
                pixels=pixels,
                bit_depth=bit_depth,
                embryo_id=entry.embryo_id,
                time_min=entry.time_min,
                slice_index=entry.slice_index or 0,
                origin_x=entry.origin_x or 0,
                origin_y=entry.origin_y or 0,
                label=entry.label,
            )
        )
    try:
        return PatchSet.from_patches(patches)
    except ValueError as e:
        raise InputError(f"{manifest_path}: {e}") from e


def write_patch_set(patch_set, out_dir, prefix="patch"):
    """Write every patch as a PGM under ``out_dir/patches`` plus ``out_dir/manifest.jsonl``"""
    ensure_directory(os.path.join(out_dir, "patches"))
    entries = []
    for index in range(len(patch_set)):
        patch = patch_set.patch(index)
        path = f"patches/{prefix}{index:05d}.pgm"
        write_pgm(os.path.join(out_dir, path), patch.pixels)
        entries.append(
            ManifestEntry(
                path=path,
                role="patch",
                embryo_id=patch.embryo_id,
                time_min=patch.time_min,
                slice_index=patch.slice_index,
                label=patch.label,
                origin_x=patch.origin_x,
                origin_y=patch.origin_y,
            )
        )
    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    write_manifest(manifest_path, entries)
    return manifest_path
