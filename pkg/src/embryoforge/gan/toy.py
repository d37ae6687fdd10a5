"""One-dimensional Gaussian data for exercising the adversarial loops quickly"""

import numpy as np

from ..models.builders import build_mlp_critic, build_mlp_generator
from .config import TrainConfig

TOY_MEAN = 3.0
TOY_STD = 0.5
TOY_HIDDEN = (64, 64)

# Small networks on 1-D data tolerate (and need) a larger step than image GANs
TOY_OVERRIDES = {"lr_gan": 1e-3, "batch_size": 64, "latent_dim": 8, "augment": False}


def gaussian_samples(n, rng, mean=TOY_MEAN, std=TOY_STD, dtype=np.float32):
    return rng.normal(mean, std, (n, 1)).astype(dtype)


def toy_train_config(**overrides):
    data = dict(TOY_OVERRIDES)
    data.update(overrides)
    return TrainConfig.from_dict(data)


class GaussianData:
    """The 1-D toy distribution as a GAN dataset"""

    def __init__(self, mean=TOY_MEAN, std=TOY_STD):
        if std <= 0:
            raise ValueError(f"std must be positive, got {std}")
        self.mean = float(mean)
        self.std = float(std)

    def plan(self, batch_size, streams, dtype=np.float32):
        return GaussianPlan(batch_size, streams, self.mean, self.std, dtype)


class GaussianPlan:
    """Batch source that draws fresh samples for every step"""

    def __init__(self, batch_size, streams, mean=TOY_MEAN, std=TOY_STD, dtype=np.float32):
        self.batch_size = int(batch_size)
        self.streams = streams
        self.mean = mean
        self.std = std
        self.dtype = dtype
        self.sample_shape = (1,)

    def batch(self, step):
        rng = self.streams.for_step("data_order", step)
        return gaussian_samples(self.batch_size, rng, self.mean, self.std, self.dtype), None, None


def build_toy_networks(cfg, rng, loss_kind=None, hidden=TOY_HIDDEN):
    """(generator, critic) MLPs for 1-D data"""
    loss_kind = loss_kind or cfg.loss_kind
    generator = build_mlp_generator(cfg.latent_dim, 1, rng, hidden=hidden, dtype=cfg.dtype)
    critic = build_mlp_critic(
        1, rng, hidden=hidden, dtype=cfg.dtype, output="sigmoid" if loss_kind == "minimax" else "linear"
    )
    return generator, critic
