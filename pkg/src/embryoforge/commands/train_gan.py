"""Train a generator against a WGAN-GP critic or a minimax discriminator"""

import os

import numpy as np

from ..common.errors import ConfigError
from ..common.log import log
from ..common.rng import RngStreams
from ..dataio.checkpoint import load_checkpoint
from ..dataio.patchset import load_patch_set
from ..gan.toy import TOY_OVERRIDES, GaussianData
from ..gan.trace import LossTrace
from ..gan.train_gan import LAST_GOOD_CRITIC, LAST_GOOD_GENERATOR, sample_latent, train_gan
from ..storage.storage_file import StorageFile
from ..tensor import no_grad, resolve_dtype
from .command_base import CommandBase
from .parameters import DTYPE, OUT, SEED, network_parameters, train_parameters

TOY_DATA = "toy"
# for_step key of the latent batch used to summarize a toy generator
TOY_SUMMARY_STEP = 1

info = {
    "class_name": "TrainGanCommand",
    "command": "train-gan",
    "section": "train_gan",
    "description": (
        "Adversarial training on a patch manifest, or on the 1-D Gaussian toy with --data toy. "
        "Writes generator.ckpt, critic.ckpt, trace.csv and sample montages."
    ),
    "config_parameters": [
        {
            "name": "data",
            "type": "path",
            "required": True,
            "description": "Patch manifest, or 'toy' for the 1-D Gaussian experiment",
        },
        OUT,
        {
            "name": "resume",
            "type": "path",
            "description": "Directory holding generator and critic checkpoints to continue from",
        },
        {
            "name": "checkpoint_storage",
            "type": "string",
            "description": "Name of a configured storage for last-good checkpoints (default: <out>/last_good)",
        },
        SEED,
        DTYPE,
        *train_parameters(
            "batch_size",
            "iterations",
            "lr_gan",
            "betas_gan",
            "n_critic",
            "penalty_weight",
            "latent_dim",
            "loss_kind",
            "saturating_generator",
            "sample_every",
            "sample_grid",
            "checkpoint_every",
            "log_every",
        ),
        *network_parameters(),
        {
            "name": "toy_samples",
            "type": "int",
            "default": 10000,
            "description": "Generator samples drawn to summarize a toy run",
        },
    ],
}


def find_resume_checkpoints(directory):
    """(generator, critic) checkpoints of a finished run, else the retained last-good pair"""
    for generator_name, critic_name in (
        ("generator.ckpt", "critic.ckpt"),
        (LAST_GOOD_GENERATOR, LAST_GOOD_CRITIC),
    ):
        generator_path = os.path.join(directory, generator_name)
        critic_path = os.path.join(directory, critic_name)
        if os.path.exists(generator_path) and os.path.exists(critic_path):
            return load_checkpoint(generator_path), load_checkpoint(critic_path)
    raise ConfigError(f"No generator / critic checkpoint pair found in {directory}")


def find_resume_trace(directory):
    """Loss trace written by the run being resumed, if it left one"""
    path = os.path.join(directory, "trace.csv")
    return LossTrace.from_csv(path) if os.path.exists(path) else None


class TrainGanCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def run(self):
        out = self.get_config("out")
        data = self.get_config("data")
        if data == TOY_DATA:
            # The toy preset replaces defaults only; files and flags still win
            for key, value in TOY_OVERRIDES.items():
                if key in self.command_config and key not in self.explicit:
                    self.set_config(key, value)
            dataset = GaussianData()
            net_cfg = None
        else:
            dataset = load_patch_set(data)
            net_cfg = self.network_config(dataset.size)
        cfg = self.train_config()

        resume, previous_trace = None, None
        if self.get_config("resume"):
            resume = find_resume_checkpoints(self.get_config("resume"))
            previous_trace = find_resume_trace(self.get_config("resume"))

        self.write_resolved_config(out)
        result = train_gan(
            dataset,
            cfg,
            net_cfg=net_cfg,
            storage=self.checkpoint_storage(out),
            out_dir=out,
            resume=resume,
            previous_trace=previous_trace,
        )

        if len(result.trace):
            first, last = result.trace.rows[0], result.trace.rows[-1]
            log.info(
                "%sCritic objective went from %.5g (iteration %d) to %.5g (iteration %d)",
                self.log_identifier,
                first.critic_obj,
                first.iter,
                last.critic_obj,
                last.iter,
            )
        if data == TOY_DATA:
            self.summarize_toy(result.generator, cfg)
        return 0

    def checkpoint_storage(self, out):
        name = self.get_config("checkpoint_storage")
        if not name:
            return StorageFile({"directory": os.path.join(out, "last_good")})
        storage = self.app.storage_manager.get_storage_handler(name) if self.app else None
        if storage is None:
            raise ConfigError(f"No storage named '{name}' is configured")
        return storage

    def summarize_toy(self, generator, cfg):
        z = sample_latent(
            RngStreams(cfg.seed).for_step("latent", TOY_SUMMARY_STEP),
            self.get_config("toy_samples"),
            cfg.latent_dim,
            resolve_dtype(cfg.dtype),
        )
        with no_grad():
            samples = generator.forward(z, training=False).data[:, 0]
        mean, std = float(np.mean(samples)), float(np.std(samples))
        log.info("%sGenerated samples: mean %.4f, std %.4f", self.log_identifier, mean, std)
        return mean, std
