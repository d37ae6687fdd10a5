"""Tests for the adversarial and supervised training loops"""

import os
import sys

import numpy as np
import pytest

sys.path.append("src")

from utils_for_test_files import small_net_config  # pylint: disable=wrong-import-position

from embryoforge.common.errors import NumericalError  # pylint: disable=wrong-import-position
from embryoforge.dataio.checkpoint import load_checkpoint  # pylint: disable=wrong-import-position
from embryoforge.dataio.pgm import read_pgm  # pylint: disable=wrong-import-position
from embryoforge.dataio.synth import synth_labeled_patches  # pylint: disable=wrong-import-position
from embryoforge.gan.config import TrainConfig  # pylint: disable=wrong-import-position
from embryoforge.gan.losses import interpolate_gradient_norms  # pylint: disable=wrong-import-position
from embryoforge.gan.overfit import overfit_demo  # pylint: disable=wrong-import-position
from embryoforge.gan.toy import GaussianData, gaussian_samples, toy_train_config  # pylint: disable=wrong-import-position
from embryoforge.gan.trace import LossTrace  # pylint: disable=wrong-import-position
from embryoforge.gan.train_classifier import accuracy, train_classifier  # pylint: disable=wrong-import-position
from embryoforge.gan.train_gan import (  # pylint: disable=wrong-import-position
    LAST_GOOD_GENERATOR,
    GanTrainer,
    generate_images,
    sample_latent,
    train_gan,
)
from embryoforge.models.layers import NetworkConfig  # pylint: disable=wrong-import-position
from embryoforge.storage.storage_memory import StorageMemory  # pylint: disable=wrong-import-position
from embryoforge.tensor import no_grad  # pylint: disable=wrong-import-position

QUIET = {"log_every": 0, "sample_every": 0, "checkpoint_every": 0}


def toy_config(**overrides):
    values = dict(QUIET, iterations=10, n_critic=2, batch_size=16, seed=7)
    values.update(overrides)
    return toy_train_config(**values)


def losses_of(trace):
    return [(row.iter, row.critic_obj, row.gen_obj, row.penalty) for row in trace]


def test_toy_run_records_every_iteration():
    result = train_gan(GaussianData(), toy_config())
    assert [row.iter for row in result.trace] == list(range(1, 11))
    assert all(row.penalty >= 0 for row in result.trace)
    assert result.generator_checkpoint.iteration == 10
    assert result.generator.kind == "mlp_generator"


def test_toy_run_is_deterministic():
    """The same seed reproduces every loss value; wall time is not compared"""
    first = train_gan(GaussianData(), toy_config())
    second = train_gan(GaussianData(), toy_config())
    assert losses_of(first.trace) == losses_of(second.trace)
    for name, param in first.generator.params:
        np.testing.assert_array_equal(param.data, second.generator.params[name].data)


def test_minimax_toy_run():
    result = train_gan(GaussianData(), toy_config(loss_kind="minimax"))
    assert len(result.trace) == 10
    assert all(row.penalty == 0.0 for row in result.trace)
    assert result.critic.layer_kinds()[-1] == "sigmoid"


def test_resume_matches_uninterrupted_run():
    """Stopping after 5 iterations and resuming to 10 equals one 10-iteration run in f64"""
    full = train_gan(GaussianData(), toy_config(dtype="f64"))
    half = train_gan(GaussianData(), toy_config(dtype="f64", iterations=5))
    resumed = train_gan(
        GaussianData(),
        toy_config(dtype="f64"),
        resume=(half.generator_checkpoint, half.critic_checkpoint),
    )
    assert [row.iter for row in resumed.trace] == list(range(6, 11))
    np.testing.assert_allclose(
        [row[1:] for row in losses_of(resumed.trace)],
        [row[1:] for row in losses_of(full.trace)[5:]],
        rtol=1e-12,
    )
    for name, param in full.generator.params:
        np.testing.assert_allclose(resumed.generator.params[name].data, param.data, rtol=1e-12)


def test_resume_carries_the_earlier_trace(tmp_path):
    """The trace written by a resumed run starts at iteration 1"""
    full = train_gan(GaussianData(), toy_config(dtype="f64"))
    first_dir, second_dir = str(tmp_path / "first"), str(tmp_path / "second")
    half = train_gan(GaussianData(), toy_config(dtype="f64", iterations=5), out_dir=first_dir)
    previous = LossTrace.from_csv(os.path.join(first_dir, "trace.csv"))
    train_gan(
        GaussianData(),
        toy_config(dtype="f64"),
        out_dir=second_dir,
        resume=(half.generator_checkpoint, half.critic_checkpoint),
        previous_trace=previous,
    )
    written = LossTrace.from_csv(os.path.join(second_dir, "trace.csv"))
    assert [row.iter for row in written] == list(range(1, 11))
    np.testing.assert_allclose(
        [row[1:] for row in losses_of(written)], [row[1:] for row in losses_of(full.trace)], rtol=1e-12
    )

    # Rows the earlier run logged past the checkpoint are dropped
    rerun = train_gan(
        GaussianData(),
        toy_config(dtype="f64", iterations=6),
        resume=(half.generator_checkpoint, half.critic_checkpoint),
        previous_trace=full.trace,
    )
    assert [row.iter for row in rerun.trace] == list(range(1, 7))


def test_last_good_checkpoints_are_retained():
    storage = StorageMemory({})
    train_gan(GaussianData(), toy_config(checkpoint_every=5), storage=storage)
    assert storage.get(LAST_GOOD_GENERATOR) is not None


def test_non_finite_loss_stops_with_last_good(tmp_path, monkeypatch):
    """A NaN generator loss raises NumericalError naming the retained checkpoint"""
    monkeypatch.setattr(GanTrainer, "generator_step", lambda self: float("nan"))
    out_dir = str(tmp_path / "run")
    with pytest.raises(NumericalError) as excinfo:
        train_gan(GaussianData(), toy_config(), out_dir=out_dir)
    assert excinfo.value.exit_code == 2
    assert excinfo.value.last_good is not None
    assert os.path.exists(os.path.join(out_dir, "trace.csv"))
    assert not os.path.exists(os.path.join(out_dir, "generator.ckpt"))


def test_image_gan_writes_outputs(tmp_path):
    """A short image run writes checkpoints, the trace and sample montages"""
    patches = synth_labeled_patches(16, 16, np.random.default_rng(0))
    cfg = TrainConfig(
        iterations=2,
        n_critic=1,
        batch_size=4,
        latent_dim=8,
        sample_every=1,
        sample_grid=2,
        log_every=0,
        checkpoint_every=0,
    )
    out_dir = str(tmp_path / "gan")
    result = train_gan(patches, cfg, net_cfg=small_net_config(16), out_dir=out_dir)
    for name in ("generator.ckpt", "critic.ckpt", "trace.csv", "samples_000002.pgm"):
        assert os.path.exists(os.path.join(out_dir, name))
    # A 2x2 grid of 16-pixel samples with two-pixel separators
    assert read_pgm(os.path.join(out_dir, "samples_000002.pgm")).shape == (34, 34)
    assert load_checkpoint(os.path.join(out_dir, "generator.ckpt")).iteration == 2
    assert result.sample_paths[-1].endswith("samples_000002.pgm")


def test_accuracy():
    assert accuracy([[0.1, 0.9], [0.8, 0.2]], [1, 1]) == 0.5
    with pytest.raises(ValueError):
        accuracy(np.zeros((0, 2)), [])


def test_classifier_training_history(tmp_path):
    data = synth_labeled_patches(24, 16, np.random.default_rng(0))
    train, test = data.split(16)
    cfg = TrainConfig(epochs=2, batch_size=8, lr_classifier=1e-3, augment=True)
    result = train_classifier(train, test, cfg, net_cfg=small_net_config(16), out_dir=str(tmp_path))
    assert [stats.epoch for stats in result.history] == [1, 2]
    for stats in result.history:
        assert 0.0 <= stats.test_accuracy <= 1.0
        assert np.isfinite(stats.train_loss)
    assert len(result.accuracy_trace) == 2


def test_classifier_needs_labels():
    data = synth_labeled_patches(8, 16, np.random.default_rng(0))
    unlabeled = data.subset(range(4))
    unlabeled.labels = None
    with pytest.raises(ValueError):
        train_classifier(unlabeled, data, TrainConfig(epochs=1))


def test_overfit_demo_report(tmp_path):
    data = synth_labeled_patches(16, 16, np.random.default_rng(0)).split(8)
    report = overfit_demo(
        TrainConfig(epochs=1, batch_size=4),
        widths=(1.0, 0.5),
        seeds=2,
        net_cfg=small_net_config(16),
        data=data,
        out_dir=str(tmp_path),
    )
    assert len(report.rows) == 4
    assert [s.width_scale for s in report.summaries] == [1.0, 0.5]
    assert 0.0 <= report.narrow_not_worse_fraction <= 1.0
    assert (tmp_path / "overfit.csv").read_text(encoding="utf-8").startswith("width_scale,seed")


@pytest.mark.slow
def test_toy_generator_matches_target_distribution():
    """After a full toy run generated samples have mean near 3 and std near 0.5"""
    result = train_gan(GaussianData(), toy_train_config(iterations=3000, **QUIET))
    z = sample_latent(np.random.default_rng(1), 10000, result.generator.input_shape[0])
    with no_grad():
        samples = result.generator.forward(z).data[:, 0]
    assert 2.7 <= samples.mean() <= 3.3
    assert 0.3 <= samples.std() <= 0.7


@pytest.mark.slow
def test_classifier_separates_rosettes():
    """The classifier reaches 95% test accuracy on 500 / 100 synthetic rosette patches"""
    rng = np.random.default_rng(0)
    train = synth_labeled_patches(500, 32, rng)
    test = synth_labeled_patches(100, 32, rng)
    cfg = TrainConfig(epochs=15, batch_size=32, lr_classifier=1e-3)
    result = train_classifier(train, test, cfg, net_cfg=small_net_config(32, base_filters=8, hidden_units=64))
    assert result.history[-1].test_accuracy >= 0.95


def mean_interpolate_norm(result, seed=3):
    rng = np.random.default_rng(seed)
    real = gaussian_samples(256, rng)
    z = sample_latent(rng, 256, result.generator.input_shape[0])
    with no_grad():
        fake = result.generator.forward(z).data
    return interpolate_gradient_norms(result.critic, real, fake, rng).mean()


def test_unpenalized_critic_gradients_grow():
    """Without the penalty the toy critic's input gradients exceed 1 on average"""
    free = train_gan(GaussianData(), toy_config(iterations=200, n_critic=5, penalty_weight=0.0))
    penalized = train_gan(GaussianData(), toy_config(iterations=200, n_critic=5))
    assert mean_interpolate_norm(free) > 1.0
    assert mean_interpolate_norm(free) > mean_interpolate_norm(penalized)


@pytest.mark.slow
def test_membrane_gan_wasserstein_trend():
    """3000 iterations on 2000 synthetic 32x32 membrane patches.

    The 100-iteration moving average of the Wasserstein estimate ends below
    its value at iteration 300, and generated samples are about as bright as
    the corpus."""
    patches = synth_labeled_patches(2000, 32, np.random.default_rng(0))
    cfg = TrainConfig(iterations=3000, log_every=0, sample_every=0, checkpoint_every=0)
    net_cfg = NetworkConfig(input_size=32, base_filters=16, hidden_units=64)
    result = train_gan(patches, cfg, net_cfg=net_cfg)

    averages = result.trace.moving_average("critic_obj", 100)
    # averages[i] covers iterations i + 1 .. i + 100
    assert averages[-1] < averages[300 - 100]

    z = sample_latent(np.random.default_rng(1), 256, cfg.latent_dim)
    samples = generate_images(result.generator, z, patches.bit_depth)
    corpus_mean = patches.mean_intensity()
    assert abs(samples.mean() - corpus_mean) <= 0.15 * corpus_mean


@pytest.mark.slow
def test_full_width_classifier_memorizes_small_set(tmp_path):
    """On 198 training patches the full-width net reaches 99% train accuracy for every seed"""
    cfg = TrainConfig(epochs=30, batch_size=32, lr_classifier=1e-3, augment=False)
    report = overfit_demo(
        cfg,
        train_size=198,
        test_size=100,
        widths=(1.0, 0.5),
        seeds=10,
        net_cfg=NetworkConfig(input_size=32),
        out_dir=str(tmp_path),
    )
    assert len(report.rows) == 20
    for row in report.rows:
        if row.width_scale == 1.0:
            assert row.train_accuracy >= 0.99, f"seed {row.seed}: {row.train_accuracy}"
    assert [summary.width_scale for summary in report.summaries] == [1.0, 0.5]
    assert (tmp_path / "overfit.csv").exists()
