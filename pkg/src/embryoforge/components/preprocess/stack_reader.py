"""Read one raw stack named by a manifest entry"""

import os

from ..component_base import ComponentBase
from ...common.errors import InputError
from ...dataio.manifest import ManifestEntry
from ...dataio.pgm import read_pgm
from ...dataio.synth import image_to_stack
from ...imaging.stack import BoundingBox

info = {
    "class_name": "StackReader",
    "description": (
        "Read the PGM file of a raw_stack manifest entry and split it into its slices. "
        "The entry must carry a bounding box."
    ),
    "config_parameters": [
        {
            "name": "input_dir",
            "type": "path",
            "required": True,
            "description": "Directory the manifest paths are relative to",
        },
        {
            "name": "default_n_slices",
            "type": "int",
            "required": False,
            "default": 30,
            "description": "Slice count for entries that do not record n_slices",
        },
    ],
    "input_schema": {
        "type": "object",
        "properties": {
            "index": {"type": "integer"},
            "entry": {"type": "object"},
        },
        "required": ["index", "entry"],
    },
    "output_schema": {
        "type": "object",
        "properties": {
            "index": {"type": "integer"},
            "entry": {"type": "object"},
            "stack": {"type": "object"},
            "bbox": {"type": "object"},
        },
    },
}


class StackReader(ComponentBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)
        self.input_dir = self.get_config("input_dir")
        self.default_n_slices = self.get_config("default_n_slices")

    def invoke(self, message, data):
        entry = ManifestEntry.from_dict(data["entry"])
        if entry.bbox is None:
            raise InputError(f"{entry.path}: manifest entry has no bounding box")
        image = read_pgm(os.path.join(self.input_dir, entry.path))
        bit_depth = 8 if image.dtype.itemsize == 1 else 16
        try:
            stack = image_to_stack(
                image,
                entry.n_slices or self.default_n_slices,
                bit_depth=bit_depth,
                embryo_id=entry.embryo_id,
                time_min=entry.time_min,
            )
        except ValueError as e:
            raise InputError(f"{entry.path}: {e}") from e
        return {
            "index": data["index"],
            "entry": entry,
            "stack": stack,
            "bbox": BoundingBox.from_value(entry.bbox),
        }
