"""Alternating critic / generator training"""

import os
import time
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..common.errors import ConfigError, NumericalError
from ..common.log import log
from ..common.rng import RngStreams
from ..common.utils import ensure_directory
from ..dataio.checkpoint import (
    Checkpoint,
    encode_checkpoint,
    network_checkpoint,
    restore_network,
    restore_optimizer,
    save_checkpoint,
)
from ..dataio.loader import BatchPlan, PrefetchLoader
from ..dataio.montage import write_montage
from ..dataio.patchset import PatchSet
from ..imaging.augment import denormalize_from_net
from ..models.builders import build_critic, build_generator
from ..models.layers import NetworkConfig
from ..models.network import Network
from ..nn.adam import AdamState, adam_step
from ..storage.storage_memory import StorageMemory
from ..tensor import backward, no_grad, ops, resolve_dtype
from .losses import (
    gradient_penalty,
    minimax_generator_loss,
    minimax_loss,
    wasserstein_estimate,
    wasserstein_objective,
)
from .toy import GaussianData, build_toy_networks
from .trace import LossTrace

LAST_GOOD_GENERATOR = "generator_last_good.ckpt"
LAST_GOOD_CRITIC = "critic_last_good.ckpt"
# for_step key of the fixed latent batch behind every sample grid
SAMPLE_LATENT_STEP = 0


@dataclass
class GanResult:
    generator_checkpoint: Checkpoint
    critic_checkpoint: Checkpoint
    trace: LossTrace
    generator: Network
    critic: Network
    sample_paths: List[str] = field(default_factory=list)


def sample_latent(rng, n, latent_dim, dtype=np.float32):
    """Standard Gaussian latent vectors [n, latent_dim]"""
    return rng.standard_normal((n, latent_dim)).astype(dtype)


def generate_images(generator, z, bit_depth=8):
    """Generator output in eval mode as integer images [N, H, W]"""
    with no_grad():
        out = generator.forward(z, training=False)
    return denormalize_from_net(out.data[:, 0], bit_depth)


class GanTrainer:
    """One adversarial training session: networks, optimizers, streams and trace"""

    def __init__(self, dataset, cfg, net_cfg=None, storage=None, out_dir=None, resume=None, previous_trace=None):
        self.log_identifier = "[embryoforge.train_gan] "
        self.cfg = cfg
        self.dtype = resolve_dtype(cfg.dtype)
        self.dataset = dataset
        self.storage = storage or StorageMemory({})
        self.out_dir = out_dir
        self.streams = RngStreams(cfg.seed)
        self.trace = LossTrace()
        self.sample_paths = []
        self.last_good = None

        if resume is not None:
            self._resume(*resume)
            if previous_trace is not None:
                # Rows past the checkpoint are replayed by this run
                self.trace = LossTrace(row for row in previous_trace if row.iter <= self.iteration)
        else:
            self._build(net_cfg)

        if isinstance(dataset, PatchSet):
            if not len(dataset):
                raise ValueError("Cannot train a GAN on an empty patch set")
            self.plan = BatchPlan(dataset, cfg.batch_size, self.streams, augment=None, dtype=self.dtype)
        elif isinstance(dataset, GaussianData):
            self.plan = dataset.plan(cfg.batch_size, self.streams, self.dtype)
        else:
            raise TypeError(f"Unsupported GAN dataset {type(dataset).__name__}")

    # -- setup ----------------------------------------------------------------

    def _build(self, net_cfg):
        cfg = self.cfg
        init_rng = self.streams.stream("init")
        if isinstance(self.dataset, GaussianData):
            self.generator, self.critic = build_toy_networks(cfg, init_rng)
        else:
            net_cfg = net_cfg or NetworkConfig(input_size=self.dataset.size)
            if net_cfg.input_size != self.dataset.size:
                raise ConfigError(
                    f"Network input_size {net_cfg.input_size} does not match {self.dataset.size}-pixel patches"
                )
            output = "sigmoid" if cfg.loss_kind == "minimax" else "linear"
            self.generator = build_generator(cfg.latent_dim, net_cfg, init_rng, dtype=cfg.dtype)
            self.critic = build_critic(net_cfg, init_rng, dtype=cfg.dtype, output=output)
        self.g_opt = AdamState.for_params(self.generator.params, cfg.lr_gan, cfg.betas_gan)
        self.c_opt = AdamState.for_params(self.critic.params, cfg.lr_gan, cfg.betas_gan)
        self.iteration = 0

    def _resume(self, generator_checkpoint, critic_checkpoint):
        if generator_checkpoint.iteration != critic_checkpoint.iteration:
            raise ConfigError(
                f"Generator checkpoint is at iteration {generator_checkpoint.iteration}, "
                f"critic checkpoint at {critic_checkpoint.iteration}"
            )
        self.generator = restore_network(generator_checkpoint)
        self.critic = restore_network(critic_checkpoint)
        self.g_opt = restore_optimizer(generator_checkpoint)
        self.c_opt = restore_optimizer(critic_checkpoint)
        if self.g_opt is None or self.c_opt is None:
            raise ConfigError("Resuming needs checkpoints that carry optimizer state")
        self.streams.set_state(generator_checkpoint.rng_state)
        self.iteration = int(generator_checkpoint.iteration)
        log.info("%sResuming from iteration %d", self.log_identifier, self.iteration)

    # -- checkpoints ------------------------------------------------------------

    def checkpoints(self):
        metadata = {"train_config": self.cfg.to_dict()}
        rng_state = self.streams.get_state()
        generator_checkpoint = network_checkpoint(
            self.generator, self.g_opt, rng_state, self.iteration, dict(metadata, role="generator")
        )
        critic_checkpoint = network_checkpoint(
            self.critic, self.c_opt, rng_state, self.iteration, dict(metadata, role="critic")
        )
        return generator_checkpoint, critic_checkpoint

    def retain_last_good(self):
        generator_checkpoint, critic_checkpoint = self.checkpoints()
        self.storage.put(LAST_GOOD_GENERATOR, encode_checkpoint(generator_checkpoint))
        self.storage.put(LAST_GOOD_CRITIC, encode_checkpoint(critic_checkpoint))
        self.last_good = self.storage.location(LAST_GOOD_GENERATOR)
        log.debug("%sRetained checkpoints of iteration %d", self.log_identifier, self.iteration)

    # -- steps ------------------------------------------------------------------

    def _fake_batch(self, n, training=True):
        z = sample_latent(self.streams.stream("latent"), n, self.cfg.latent_dim, self.dtype)
        return self.generator.forward(z, training=training)

    def critic_step(self, real):
        """One critic update; returns (critic objective for the trace, penalty value)"""
        cfg = self.cfg
        with no_grad():
            fake = self._fake_batch(len(real)).data
        d_real = self.critic.forward(real, training=True)
        d_fake = self.critic.forward(fake, training=True)
        if cfg.loss_kind == "wgan_gp":
            penalty = 0.0
            if cfg.penalty_weight > 0:
                penalty = gradient_penalty(
                    self.critic,
                    real,
                    fake,
                    cfg.penalty_weight,
                    self.streams.stream("epsilon"),
                    training=not self.critic.has_batch_norm,
                )
            loss, _ = wasserstein_objective(d_real, d_fake, penalty)
            objective = wasserstein_estimate(d_real, d_fake)
            penalty_value = float(penalty.item()) if not isinstance(penalty, float) else penalty
        else:
            loss, _ = minimax_loss(d_real, d_fake, cfg.saturating_generator)
            objective = float(loss.item())
            penalty_value = 0.0
        if not np.isfinite(loss.item()):
            raise NumericalError(f"Non-finite critic loss at iteration {self.iteration + 1}")
        grads = backward(loss, self.critic.params.tensors())
        adam_step(self.critic.params, grads, self.c_opt)
        return objective, penalty_value

    def generator_step(self):
        cfg = self.cfg
        fake = self._fake_batch(cfg.batch_size)
        d_fake = self.critic.forward(fake, training=True)
        if cfg.loss_kind == "wgan_gp":
            loss = ops.neg(ops.mean(d_fake))
        else:
            loss = minimax_generator_loss(d_fake, cfg.saturating_generator)
        if not np.isfinite(loss.item()):
            raise NumericalError(f"Non-finite generator loss at iteration {self.iteration + 1}")
        grads = backward(loss, self.generator.params.tensors())
        adam_step(self.generator.params, grads, self.g_opt)
        return float(loss.item())

    # -- samples ----------------------------------------------------------------

    def write_samples(self):
        if not self.out_dir or not isinstance(self.dataset, PatchSet):
            return None
        count = self.cfg.sample_grid * self.cfg.sample_grid
        z = sample_latent(
            self.streams.for_step("latent", SAMPLE_LATENT_STEP), count, self.cfg.latent_dim, self.dtype
        )
        images = generate_images(self.generator, z, self.dataset.bit_depth)
        path = os.path.join(self.out_dir, f"samples_{self.iteration:06d}.pgm")
        write_montage(path, images, cols=self.cfg.sample_grid, bit_depth=self.dataset.bit_depth)
        self.sample_paths.append(path)
        return path

    # -- loop -------------------------------------------------------------------

    def run(self):
        cfg = self.cfg
        if self.out_dir:
            ensure_directory(self.out_dir)
        remaining = max(0, cfg.iterations - self.iteration)
        self.retain_last_good()
        log.info(
            "%sTraining %s for %d iterations (%d critic steps each, batch %d)",
            self.log_identifier,
            cfg.loss_kind,
            remaining,
            cfg.n_critic,
            cfg.batch_size,
        )
        loader = PrefetchLoader(
            self.plan, start_step=self.iteration * cfg.n_critic, n_steps=remaining * cfg.n_critic
        )
        batches = iter(loader)
        try:
            for _ in range(remaining):
                started = time.perf_counter()
                for _ in range(cfg.n_critic):
                    _, (real, _, _) = next(batches)
                    critic_obj, penalty = self.critic_step(real)
                gen_obj = self.generator_step()
                self.iteration += 1
                wall_ms = (time.perf_counter() - started) * 1000.0
                self.trace.append(self.iteration, critic_obj, gen_obj, penalty, wall_ms)

                if cfg.log_every and self.iteration % cfg.log_every == 0:
                    log.info(
                        "%sIteration %d: critic %.5g, generator %.5g, penalty %.5g",
                        self.log_identifier,
                        self.iteration,
                        critic_obj,
                        gen_obj,
                        penalty,
                    )
                if cfg.checkpoint_every and self.iteration % cfg.checkpoint_every == 0:
                    self.retain_last_good()
                if cfg.sample_every and self.iteration % cfg.sample_every == 0:
                    self.write_samples()
        except NumericalError as e:
            self._write_outputs(final=False)
            raise NumericalError(
                f"{e}; last good checkpoint: {self.last_good}", last_good=self.last_good
            ) from e
        finally:
            loader.close()

        generator_checkpoint, critic_checkpoint = self._write_outputs(final=True)
        return GanResult(
            generator_checkpoint=generator_checkpoint,
            critic_checkpoint=critic_checkpoint,
            trace=self.trace,
            generator=self.generator,
            critic=self.critic,
            sample_paths=self.sample_paths,
        )

    def _write_outputs(self, final):
        generator_checkpoint, critic_checkpoint = self.checkpoints()
        if self.out_dir:
            self.trace.to_csv(os.path.join(self.out_dir, "trace.csv"))
            if final:
                save_checkpoint(os.path.join(self.out_dir, "generator.ckpt"), generator_checkpoint)
                save_checkpoint(os.path.join(self.out_dir, "critic.ckpt"), critic_checkpoint)
                if not self.sample_paths or not self.sample_paths[-1].endswith(f"{self.iteration:06d}.pgm"):
                    self.write_samples()
        return generator_checkpoint, critic_checkpoint


def train_gan(dataset, cfg, net_cfg=None, storage=None, out_dir=None, resume=None, previous_trace=None):
    """Train a generator against a critic (WGAN-GP) or discriminator (minimax).

    ``dataset`` is a PatchSet of images or GaussianData for the 1-D toy.
    ``resume`` is a (generator, critic) checkpoint pair; the run then
    continues up to ``cfg.iterations`` total iterations exactly as an
    uninterrupted run would. ``previous_trace``, the LossTrace of the run being
    resumed, is carried over so the written trace covers every iteration.
    Returns a GanResult."""
    return GanTrainer(
        dataset,
        cfg,
        net_cfg=net_cfg,
        storage=storage,
        out_dir=out_dir,
        resume=resume,
        previous_trace=previous_trace,
    ).run()
