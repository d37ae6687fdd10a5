"""Random patch sampling stage"""

import numpy as np

from ..component_base import ComponentBase
from ...common.rng import derive_seed
from ...common.utils import parse_slice_range
from ...imaging.patches import extract_patches

info = {
    "class_name": "PatchExtractor",
    "description": (
        "Sample patches inside the bounding box of every slice in a range. "
        "Each stack draws from its own generator, seeded from (seed, job index), "
        "so the result does not depend on which worker handles the stack."
    ),
    "config_parameters": [
        {"name": "patch", "type": "int", "default": 128, "description": "Patch side in pixels"},
        {
            "name": "slices",
            "type": "string",
            "required": False,
            "default": "9:13",
            "description": "Inclusive slice range lo:hi",
        },
        {"name": "per_slice", "type": "int", "default": 1, "description": "Patches per slice"},
        {"name": "seed", "type": "int", "default": 0, "description": "Master seed"},
    ],
}


class PatchExtractor(ComponentBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)
        self.patch = self.get_config("patch")
        self.slice_lo, self.slice_hi = parse_slice_range(self.get_config("slices"))
        self.per_slice = self.get_config("per_slice")
        self.seed = self.get_config("seed")

    def invoke(self, message, data):
        rng = np.random.default_rng(derive_seed(self.seed, data["index"]))
        data["patches"] = extract_patches(
            data["stack"],
            data["bbox"],
            self.slice_lo,
            self.slice_hi,
            self.per_slice,
            self.patch,
            rng,
        )
        # The full stack is not needed past this point
        data["stack"] = None
        return data
