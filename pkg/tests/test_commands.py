"""End to end tests of the command line"""

import csv
import json
import os
import sys

import numpy as np
import pytest

sys.path.append("src")

from utils_for_test_files import small_net_config  # pylint: disable=wrong-import-position

from embryoforge.dataio.checkpoint import save_checkpoint  # pylint: disable=wrong-import-position
from embryoforge.dataio.pgm import read_pgm  # pylint: disable=wrong-import-position
from embryoforge.gan.train_gan import GanTrainer  # pylint: disable=wrong-import-position
from embryoforge.dataio.manifest import read_manifest  # pylint: disable=wrong-import-position
from embryoforge.dataio.synth import synth_labeled_patches  # pylint: disable=wrong-import-position
from embryoforge.gan.config import TrainConfig  # pylint: disable=wrong-import-position
from embryoforge.gan.train_gan import train_gan  # pylint: disable=wrong-import-position
from embryoforge.main import main  # pylint: disable=wrong-import-position

SYNTH_FLAGS = ["--embryos", "2", "--stacks", "3", "--size", "64", "--n-slices", "16", "--seed", "4"]
PREPROCESS_FLAGS = ["--patch", "16", "--seed", "11"]
TOY_FLAGS = ["--iterations", "3", "--n-critic", "2", "--log-every", "0", "--sample-every", "0"]


@pytest.fixture
def quiet_config(tmp_path):
    """A config file that keeps the log quiet and off the disk"""
    path = tmp_path / "quiet.yaml"
    path.write_text("log:\n  stdout_log_level: WARNING\n  log_file: null\n", encoding="utf-8")
    return str(path)


def run(quiet_config, *args):
    return main(["-c", quiet_config, *args])


@pytest.fixture
def raw_corpus(tmp_path, quiet_config):
    out = str(tmp_path / "raw")
    assert run(quiet_config, "synth", "--out", out, *SYNTH_FLAGS) == 0
    return out


def test_synth_writes_corpus(raw_corpus):
    entries = read_manifest(os.path.join(raw_corpus, "manifest.jsonl"))
    assert len(entries) == 6
    assert all(entry.role == "raw_stack" and entry.bbox for entry in entries)
    assert read_pgm(os.path.join(raw_corpus, entries[0].path)).shape == (16 * 64, 64)
    assert os.path.exists(os.path.join(raw_corpus, "resolved_config.yaml"))


def test_preprocess_patch_count(raw_corpus, tmp_path, quiet_config):
    """Two embryos, three stacks each and five slices give 30 patches"""
    out = str(tmp_path / "patches")
    assert run(quiet_config, "preprocess", "--input", raw_corpus, "--out", out, *PREPROCESS_FLAGS) == 0
    entries = read_manifest(os.path.join(out, "manifest.jsonl"))
    assert len(entries) == 30
    assert {entry.slice_index for entry in entries} == {9, 10, 11, 12, 13}
    for entry in entries:
        assert entry.role == "patch" and entry.bbox is not None and entry.seed_used is not None
        assert read_pgm(os.path.join(out, entry.path)).shape == (16, 16)


def test_preprocess_is_reproducible(raw_corpus, tmp_path, quiet_config):
    """Rerunning with another thread count writes identical bytes"""
    first, second = str(tmp_path / "one"), str(tmp_path / "two")
    assert run(quiet_config, "preprocess", "--input", raw_corpus, "--out", first, "--threads", "1", *PREPROCESS_FLAGS) == 0
    assert run(quiet_config, "preprocess", "--input", raw_corpus, "--out", second, "--threads", "3", *PREPROCESS_FLAGS) == 0
    with open(os.path.join(first, "manifest.jsonl"), "rb") as a, open(os.path.join(second, "manifest.jsonl"), "rb") as b:
        assert a.read() == b.read()
    for entry in read_manifest(os.path.join(first, "manifest.jsonl")):
        with open(os.path.join(first, entry.path), "rb") as a, open(os.path.join(second, entry.path), "rb") as b:
            assert a.read() == b.read()


def test_preprocess_reports_corrupt_stack(raw_corpus, tmp_path, quiet_config, capsys):
    """A broken stack file fails that stack only; the exit code is 1"""
    entries = read_manifest(os.path.join(raw_corpus, "manifest.jsonl"))
    with open(os.path.join(raw_corpus, entries[1].path), "wb") as file:
        file.write(b"P5\n64 1024 255\n\x00\x01")
    out = str(tmp_path / "patches")
    assert run(quiet_config, "preprocess", "--input", raw_corpus, "--out", out, *PREPROCESS_FLAGS) == 1
    written = read_manifest(os.path.join(out, "manifest.jsonl"))
    assert len(written) == 25
    assert entries[1].path in capsys.readouterr().out


def test_preprocess_missing_bbox(raw_corpus, tmp_path, quiet_config):
    manifest = os.path.join(raw_corpus, "manifest.jsonl")
    with open(manifest, "r", encoding="utf-8") as file:
        lines = [json.loads(line) for line in file]
    del lines[0]["bbox"]
    with open(manifest, "w", encoding="utf-8") as file:
        file.writelines(json.dumps(line) + "\n" for line in lines)
    out = str(tmp_path / "patches")
    assert run(quiet_config, "preprocess", "--input", raw_corpus, "--out", out, *PREPROCESS_FLAGS) == 1
    assert len(read_manifest(os.path.join(out, "manifest.jsonl"))) == 25


def test_preprocess_missing_input(tmp_path, quiet_config):
    assert run(quiet_config, "preprocess", "--input", str(tmp_path / "none"), "--out", str(tmp_path / "o")) == 1


def test_train_gan_toy_and_generate(tmp_path, quiet_config):
    """A short toy run leaves a generator that generate turns into samples.csv"""
    run_dir = str(tmp_path / "toy")
    assert run(quiet_config, "train-gan", "--data", "toy", "--out", run_dir, *TOY_FLAGS) == 0
    for name in ("generator.ckpt", "critic.ckpt", "trace.csv", "resolved_config.yaml"):
        assert os.path.exists(os.path.join(run_dir, name))

    outputs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        checkpoint = os.path.join(run_dir, "generator.ckpt")
        assert run(quiet_config, "generate", "--checkpoint", checkpoint, "--out", out, "--n", "20", "--seed", "2") == 0
        with open(os.path.join(out, "samples.csv"), "r", encoding="utf-8") as file:
            outputs.append(list(csv.reader(file)))
    assert outputs[0] == outputs[1]
    assert outputs[0][0] == ["x0"] and len(outputs[0]) == 21


def test_train_gan_resume(tmp_path, quiet_config):
    run_dir = str(tmp_path / "toy")
    assert run(quiet_config, "train-gan", "--data", "toy", "--out", run_dir, *TOY_FLAGS) == 0
    resumed = str(tmp_path / "more")
    flags = ["--iterations", "5", "--n-critic", "2", "--log-every", "0", "--sample-every", "0"]
    assert run(quiet_config, "train-gan", "--data", "toy", "--out", resumed, "--resume", run_dir, *flags) == 0
    with open(os.path.join(resumed, "trace.csv"), "r", encoding="utf-8") as file:
        rows = list(csv.reader(file))
    # The earlier run's rows are carried over
    assert [row[0] for row in rows[1:]] == ["1", "2", "3", "4", "5"]


def test_non_finite_loss_exits_2(tmp_path, quiet_config, monkeypatch):
    monkeypatch.setattr(GanTrainer, "generator_step", lambda self: float("nan"))
    out = str(tmp_path / "toy")
    assert run(quiet_config, "train-gan", "--data", "toy", "--out", out, *TOY_FLAGS) == 2
    assert os.path.exists(os.path.join(out, "last_good", "generator_last_good.ckpt"))


def test_generate_images(tmp_path, quiet_config):
    patches = synth_labeled_patches(8, 16, np.random.default_rng(0))
    cfg = TrainConfig(iterations=1, n_critic=1, batch_size=4, latent_dim=8, log_every=0, sample_every=0)
    result = train_gan(patches, cfg, net_cfg=small_net_config(16))
    checkpoint = str(tmp_path / "generator.ckpt")
    save_checkpoint(checkpoint, result.generator_checkpoint)
    out = str(tmp_path / "generated")
    assert run(quiet_config, "generate", "--checkpoint", checkpoint, "--out", out, "--n", "6", "--cols", "3") == 0
    assert len(os.listdir(os.path.join(out, "images"))) == 6
    assert read_pgm(os.path.join(out, "images", "sample_0000.pgm")).shape == (16, 16)
    # Two rows of three 16-pixel samples with two-pixel separators
    assert read_pgm(os.path.join(out, "montage.pgm")).shape == (34, 52)

    critic = str(tmp_path / "critic.ckpt")
    save_checkpoint(critic, result.critic_checkpoint)
    assert run(quiet_config, "generate", "--checkpoint", critic, "--out", out) == 1


def test_train_classifier_on_synth_sets(tmp_path, quiet_config):
    data = str(tmp_path / "data")
    assert run(
        quiet_config,
        "synth",
        "--out",
        data,
        "--embryos",
        "1",
        "--stacks",
        "1",
        "--size",
        "32",
        "--n-slices",
        "2",
        "--labeled-train",
        "8",
        "--labeled-test",
        "4",
        "--labeled-size",
        "16",
    ) == 0
    out = str(tmp_path / "classifier")
    flags = ["--epochs", "1", "--batch-size", "4", "--base-filters", "4", "--hidden-units", "8"]
    train = os.path.join(data, "labeled", "train", "manifest.jsonl")
    test = os.path.join(data, "labeled", "test", "manifest.jsonl")
    assert run(quiet_config, "train-classifier", "--train", train, "--test", test, "--out", out, *flags) == 0
    assert os.path.exists(os.path.join(out, "classifier.ckpt"))
    with open(os.path.join(out, "accuracy.csv"), "r", encoding="utf-8") as file:
        assert len(list(csv.reader(file))) == 2
    # Only one of the two splits is an error
    assert run(quiet_config, "train-classifier", "--train", train, "--out", out, *flags) == 1


def test_overfit_demo_command(tmp_path, quiet_config):
    out = str(tmp_path / "overfit")
    flags = ["--train-size", "8", "--test-size", "8", "--seeds", "1", "--patch", "16", "--epochs", "1", "--hidden-units", "8"]
    assert run(quiet_config, "overfit-demo", "--out", out, "--batch-size", "4", "--base-filters", "4", *flags) == 0
    with open(os.path.join(out, "overfit.csv"), "r", encoding="utf-8") as file:
        assert len(list(csv.reader(file))) == 3


def test_gradcheck_command(tmp_path, quiet_config):
    out = str(tmp_path / "gc")
    assert run(quiet_config, "gradcheck", "--trials", "2", "--ops", "add,mul,conv2d", "--out", out) == 0
    with open(os.path.join(out, "gradcheck.csv"), "r", encoding="utf-8") as file:
        rows = list(csv.reader(file))
    assert [row[0] for row in rows[1:]] == ["add", "mul", "conv2d"]
    assert run(quiet_config, "gradcheck", "--ops", "add,frobnicate") == 1


def test_bad_config_exits_1(tmp_path, quiet_config, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("commands:\n  synth:\n    embryos: lots\n", encoding="utf-8")
    assert run(quiet_config, "-c", str(bad), "synth", "--out", str(tmp_path / "o")) == 1
    assert "embryos" in capsys.readouterr().err
    assert main(["-c", str(tmp_path / "missing.yaml"), "gradcheck"]) == 1


def test_resolved_config_reproduces_synth(tmp_path, quiet_config):
    """Running again from resolved_config.yaml writes the same corpus"""
    first = str(tmp_path / "first")
    assert run(quiet_config, "synth", "--out", first, "--embryos", "1", "--stacks", "2", "--size", "32", "--n-slices", "3") == 0
    second = str(tmp_path / "second")
    resolved = os.path.join(first, "resolved_config.yaml")
    assert main(["-c", resolved, "-c", quiet_config, "synth", "--out", second]) == 0
    for entry in read_manifest(os.path.join(first, "manifest.jsonl")):
        with open(os.path.join(first, entry.path), "rb") as a, open(os.path.join(second, entry.path), "rb") as b:
            assert a.read() == b.read()


@pytest.mark.slow
def test_full_size_preprocessing(tmp_path, quiet_config):
    """45 embryos x 50 stacks x 5 slices give 11250 patches of 128 pixels"""
    raw = str(tmp_path / "raw")
    assert run(quiet_config, "synth", "--out", raw, "--embryos", "45", "--stacks", "50", "--size", "256") == 0
    out = str(tmp_path / "patches")
    assert run(quiet_config, "preprocess", "--input", raw, "--out", out) == 0
    assert len(read_manifest(os.path.join(out, "manifest.jsonl"))) == 11250
