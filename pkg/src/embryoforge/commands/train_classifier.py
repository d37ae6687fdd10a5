"""Train the strided convolutional classifier on labeled patches"""

import numpy as np

from ..common.errors import ConfigError
from ..common.log import log
from ..common.rng import derive_seed
from ..dataio.patchset import load_patch_set
from ..dataio.synth import synth_labeled_patches
from ..gan.train_classifier import train_classifier
from .command_base import CommandBase
from .parameters import DTYPE, OUT, SEED, network_parameters, train_parameters
from .synth import LABELED_TEST_KEY, LABELED_TRAIN_KEY

info = {
    "class_name": "TrainClassifierCommand",
    "command": "train-classifier",
    "section": "train_classifier",
    "description": (
        "Cross-entropy training with per-epoch accuracy. Without --train and --test "
        "a synthetic rosette / non-rosette task is generated. Writes classifier.ckpt and accuracy.csv."
    ),
    "config_parameters": [
        {"name": "train", "type": "path", "description": "Labeled training patch manifest"},
        {"name": "test", "type": "path", "description": "Labeled test patch manifest"},
        OUT,
        SEED,
        DTYPE,
        *train_parameters(
            "batch_size",
            "epochs",
            "lr_classifier",
            "betas_classifier",
            "dropout_rate",
            "augment",
            "flip_vertical",
            "flip_horizontal",
            "brightness_delta",
            "contrast_delta",
        ),
        *network_parameters("base_filters", "width_scale", "hidden_units"),
        {"name": "synth_train", "type": "int", "default": 500, "description": "Synthetic training patches"},
        {"name": "synth_test", "type": "int", "default": 100, "description": "Synthetic test patches"},
        {"name": "patch", "type": "int", "default": 32, "description": "Side of the synthetic patches"},
    ],
}


class TrainClassifierCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def load_splits(self):
        train_path, test_path = self.get_config("train"), self.get_config("test")
        if bool(train_path) != bool(test_path):
            raise ConfigError("Pass both --train and --test, or neither for the synthetic task")
        if train_path:
            return load_patch_set(train_path), load_patch_set(test_path)
        seed = self.get_config("seed")
        size = self.get_config("patch")
        train = synth_labeled_patches(
            self.get_config("synth_train"), size, np.random.default_rng(derive_seed(seed, LABELED_TRAIN_KEY))
        )
        test = synth_labeled_patches(
            self.get_config("synth_test"), size, np.random.default_rng(derive_seed(seed, LABELED_TEST_KEY))
        )
        return train, test

    def run(self):
        out = self.get_config("out")
        train, test = self.load_splits()
        cfg = self.train_config()
        net_cfg = self.network_config(train.size)
        self.write_resolved_config(out)
        result = train_classifier(train, test, cfg, net_cfg=net_cfg, out_dir=out)
        if result.history:
            final = result.history[-1]
            log.info(
                "%sFinal accuracy: train %.4f, test %.4f",
                self.log_identifier,
                final.train_accuracy,
                final.test_accuracy,
            )
        return 0
