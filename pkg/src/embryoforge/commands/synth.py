"""Write a synthetic raw corpus, and optionally labeled rosette patch sets"""

import os

import numpy as np

from ..common.log import log
from ..common.rng import derive_seed
from ..dataio.patchset import write_patch_set
from ..dataio.synth import synth_corpus, synth_labeled_patches
from .command_base import CommandBase
from .parameters import OUT, SEED

# derive_seed keys that keep the labeled sets independent of the raw corpus
LABELED_TRAIN_KEY = 1
LABELED_TEST_KEY = 2

info = {
    "class_name": "SynthCommand",
    "command": "synth",
    "section": "synth",
    "description": "Generate membrane-like raw stacks with bounding boxes and a manifest",
    "config_parameters": [
        OUT,
        SEED,
        {"name": "embryos", "type": "int", "default": 2, "description": "Number of embryos"},
        {"name": "stacks", "type": "int", "default": 3, "description": "Stacks per embryo, one minute apart"},
        {"name": "size", "type": "int", "default": 128, "description": "Frame side in pixels"},
        {"name": "n_slices", "type": "int", "default": 30, "description": "Slices per stack"},
        {"name": "bit_depth", "type": "int", "default": 8, "choices": [8, 16], "description": "Bits per pixel"},
        {"name": "cells", "type": "int", "description": "Cells per embryo (default: size / 8)"},
        {
            "name": "labeled_train",
            "type": "int",
            "default": 0,
            "description": "Rosette / non-rosette training patches to write under <out>/labeled/train",
        },
        {
            "name": "labeled_test",
            "type": "int",
            "default": 0,
            "description": "Labeled test patches to write under <out>/labeled/test",
        },
        {"name": "labeled_size", "type": "int", "default": 32, "description": "Side of the labeled patches"},
    ],
}


class SynthCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def run(self):
        out = self.get_config("out")
        seed = self.get_config("seed")
        bit_depth = self.get_config("bit_depth")
        if self.get_config("embryos") < 1 or self.get_config("stacks") < 1:
            raise ValueError("embryos and stacks must be at least 1")

        _, entries = synth_corpus(
            self.get_config("embryos"),
            self.get_config("stacks"),
            self.get_config("size"),
            np.random.default_rng(seed),
            n_slices=self.get_config("n_slices"),
            bit_depth=bit_depth,
            out_dir=out,
            n_cells=self.get_config("cells"),
        )
        log.info("%sWrote %d raw stacks to %s", self.log_identifier, len(entries), out)

        for name, key in (("train", LABELED_TRAIN_KEY), ("test", LABELED_TEST_KEY)):
            count = self.get_config(f"labeled_{name}")
            if not count:
                continue
            patches = synth_labeled_patches(
                count,
                self.get_config("labeled_size"),
                np.random.default_rng(derive_seed(seed, key)),
                bit_depth=bit_depth,
            )
            manifest = write_patch_set(patches, os.path.join(out, "labeled", name), prefix=f"{name}_")
            log.info("%sWrote %d labeled %s patches (%s)", self.log_identifier, count, name, manifest)

        self.write_resolved_config(out)
        return 0
