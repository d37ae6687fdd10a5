"""Sample images from a trained generator"""

import csv
import os

from ..common.errors import ConfigError
from ..common.log import log
from ..common.rng import RngStreams
from ..common.utils import ensure_directory
from ..dataio.checkpoint import load_checkpoint, restore_network
from ..dataio.montage import write_montage
from ..dataio.pgm import write_pgm
from ..gan.train_gan import generate_images, sample_latent
from ..tensor import no_grad
from .command_base import CommandBase
from .parameters import OUT, SEED

IMAGE_GENERATORS = ("generator",)
VALUE_GENERATORS = ("mlp_generator",)

info = {
    "class_name": "GenerateCommand",
    "command": "generate",
    "section": "generate",
    "description": (
        "Load a generator checkpoint and write n samples: montage.pgm plus one PGM per "
        "image, or samples.csv for a 1-D toy generator"
    ),
    "config_parameters": [
        {"name": "checkpoint", "type": "path", "required": True, "description": "Generator checkpoint"},
        OUT,
        {"name": "n", "type": "int", "default": 64, "description": "Number of samples"},
        SEED,
        {"name": "cols", "type": "int", "description": "Montage columns (default: square grid)"},
        {"name": "bit_depth", "type": "int", "default": 8, "choices": [8, 16], "description": "Bits per pixel"},
    ],
}


class GenerateCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def run(self):
        out = self.get_config("out")
        n = self.get_config("n")
        if n < 1:
            raise ValueError(f"n must be at least 1, got {n}")
        checkpoint = load_checkpoint(self.get_config("checkpoint"))
        kind = checkpoint.topology.get("kind")
        if kind not in IMAGE_GENERATORS + VALUE_GENERATORS:
            raise ConfigError(f"{self.get_config('checkpoint')} holds a {kind}, not a generator")
        generator = restore_network(checkpoint)

        ensure_directory(out)
        z = sample_latent(
            RngStreams(self.get_config("seed")).stream("latent"), n, generator.input_shape[0], generator.dtype
        )
        if kind in VALUE_GENERATORS:
            self.write_values(generator, z, out)
        else:
            self.write_images(generator, z, out)
        self.write_resolved_config(out)
        return 0

    def write_images(self, generator, z, out):
        bit_depth = self.get_config("bit_depth")
        images = generate_images(generator, z, bit_depth)
        ensure_directory(os.path.join(out, "images"))
        for index, image in enumerate(images):
            write_pgm(os.path.join(out, "images", f"sample_{index:04d}.pgm"), image)
        path = os.path.join(out, "montage.pgm")
        write_montage(path, images, cols=self.get_config("cols"), bit_depth=bit_depth)
        log.info("%sWrote %d samples and %s", self.log_identifier, len(images), path)

    def write_values(self, generator, z, out):
        with no_grad():
            values = generator.forward(z, training=False).data
        path = os.path.join(out, "samples.csv")
        with open(path, "w", encoding="utf-8", newline="") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow([f"x{i}" for i in range(values.shape[1])])
            for row in values:
                writer.writerow([repr(float(v)) for v in row])
        log.info("%sWrote %d samples to %s", self.log_identifier, len(values), path)
