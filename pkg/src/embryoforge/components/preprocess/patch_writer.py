"""Write extracted patches as PGM files"""

import os

from ..component_base import ComponentBase
from ...common.rng import derive_seed
from ...common.utils import ensure_directory
from ...dataio.manifest import ManifestEntry
from ...dataio.pgm import write_pgm

info = {
    "class_name": "PatchWriter",
    "description": "Write every patch of a job to <out_dir>/patches and return their manifest entries",
    "config_parameters": [
        {"name": "out_dir", "type": "path", "required": True, "description": "Output directory"},
        {"name": "seed", "type": "int", "default": 0, "description": "Master seed, recorded per entry"},
    ],
}


def patch_file_name(index, source_path, slice_index, number):
    stem = os.path.splitext(os.path.basename(source_path))[0]
    return f"patches/{index:05d}_{stem}_s{slice_index:02d}_{number:02d}.pgm"


class PatchWriter(ComponentBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)
        self.out_dir = self.get_config("out_dir")
        self.seed = self.get_config("seed")
        ensure_directory(os.path.join(self.out_dir, "patches"))

    def invoke(self, message, data):
        index = data["index"]
        source = data["entry"]
        seed_used = derive_seed(self.seed, index)
        entries = []
        per_slice_count = {}
        for patch in data["patches"]:
            number = per_slice_count.get(patch.slice_index, 0)
            per_slice_count[patch.slice_index] = number + 1
            path = patch_file_name(index, source.path, patch.slice_index, number)
            write_pgm(os.path.join(self.out_dir, path), patch.pixels)
            entries.append(
                ManifestEntry(
                    path=path,
                    role="patch",
                    embryo_id=patch.embryo_id,
                    time_min=patch.time_min,
                    slice_index=patch.slice_index,
                    bbox=source.bbox,
                    label=source.label,
                    seed_used=seed_used,
                    origin_x=patch.origin_x,
                    origin_y=patch.origin_y,
                )
            )
        return {"index": index, "source": source.path, "entries": entries}
