"""Tests for PGM files, manifests, checkpoints, synthetic data and batch loading"""

import json
import os
import struct
import sys

import numpy as np
import pytest

sys.path.append("src")

from embryoforge.common.errors import CheckpointError, InputError, PgmError  # pylint: disable=wrong-import-position
from embryoforge.common.rng import RngStreams  # pylint: disable=wrong-import-position
from embryoforge.dataio import (  # pylint: disable=wrong-import-position
    BatchPlan,
    ManifestEntry,
    PatchSet,
    PrefetchLoader,
    decode_checkpoint,
    decode_pgm,
    encode_checkpoint,
    encode_pgm,
    image_to_stack,
    load_checkpoint,
    load_patch_set,
    montage,
    network_checkpoint,
    read_manifest,
    read_pgm,
    restore_network,
    restore_optimizer,
    save_checkpoint,
    stack_to_image,
    synth_corpus,
    synth_labeled_patches,
    synth_stack,
    write_manifest,
    write_patch_set,
    write_pgm,
)
from embryoforge.models.builders import build_mlp_critic  # pylint: disable=wrong-import-position
from embryoforge.nn.adam import AdamState, adam_step  # pylint: disable=wrong-import-position


def test_encode_pgm_bytes():
    """An 8-bit 2x2 image is a one-line header and four raster bytes"""
    image = np.array([[1, 2], [3, 4]], dtype=np.uint8)
    assert encode_pgm(image) == b"P5\n2 2 255\n\x01\x02\x03\x04"


def test_encode_pgm_16_bit_is_big_endian():
    image = np.array([[1, 258]], dtype=np.uint16)
    assert encode_pgm(image) == b"P5\n2 1 65535\n\x00\x01\x01\x02"
    np.testing.assert_array_equal(decode_pgm(encode_pgm(image)), image)


def test_decode_pgm_with_comments():
    data = b"P5\n# made by hand\n3 1\n# depth\n255\n\x00\x7f\xff"
    np.testing.assert_array_equal(decode_pgm(data), [[0, 127, 255]])


def test_decode_rejects_other_maxvals():
    """maxval 1024 is refused and the error points at the maxval"""
    data = b"P5\n1 1 1024\n\x00\x00"
    with pytest.raises(PgmError) as excinfo:
        decode_pgm(data)
    assert excinfo.value.offset == data.index(b"1024")
    assert "1024" in str(excinfo.value)


@pytest.mark.parametrize(
    "data, offset",
    [
        (b"P2\n1 1 255\n0", 0),
        (b"P5\n2 2 255\n\x00\x00\x00", 14),
        (b"P5\nx 1 255\n\x00", 3),
        (b"P5\n1 1", 6),
    ],
)
def test_decode_errors_carry_offsets(data, offset):
    with pytest.raises(PgmError) as excinfo:
        decode_pgm(data)
    assert excinfo.value.offset == offset


def test_read_pgm_errors_name_the_file(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n4 4 255\n\x00")
    with pytest.raises(PgmError) as excinfo:
        read_pgm(str(path))
    assert "bad.pgm" in str(excinfo.value)
    with pytest.raises(InputError):
        read_pgm(str(tmp_path / "missing.pgm"))


def test_stack_image_layout():
    """Slices are concatenated along y on disk"""
    voxels = np.arange(2 * 3 * 4, dtype=np.uint8).reshape(2, 3, 4)
    stack = image_to_stack(voxels.reshape(6, 4), 2)
    np.testing.assert_array_equal(stack.voxels, voxels)
    np.testing.assert_array_equal(stack_to_image(stack)[3:], voxels[1])
    with pytest.raises(ValueError):
        image_to_stack(np.zeros((7, 4), dtype=np.uint8), 2)


def test_manifest_roundtrip(tmp_path):
    (tmp_path / "a.pgm").write_bytes(b"")
    entries = [
        ManifestEntry(path="a.pgm", role="raw_stack", embryo_id="e0", time_min=61, bbox=[1, 2, 3, 4], n_slices=30),
    ]
    path = str(tmp_path / "manifest.jsonl")
    write_manifest(path, entries)
    line = (tmp_path / "manifest.jsonl").read_text(encoding="utf-8").splitlines()[0]
    assert json.loads(line) == {
        "path": "a.pgm",
        "role": "raw_stack",
        "embryo_id": "e0",
        "time_min": 61,
        "bbox": [1, 2, 3, 4],
        "n_slices": 30,
    }
    assert read_manifest(path) == entries


def test_manifest_errors(tmp_path):
    path = tmp_path / "manifest.jsonl"
    path.write_text('{"path": "x.pgm", "role": "patch", "colour": 1}\n', encoding="utf-8")
    with pytest.raises(InputError) as excinfo:
        read_manifest(str(path))
    assert "colour" in str(excinfo.value)

    path.write_text('{"path": "x.pgm", "role": "patch"}\n', encoding="utf-8")
    with pytest.raises(InputError):
        read_manifest(str(path))
    assert len(read_manifest(str(path), check_files=False)) == 1

    path.write_text('{"path": "x.pgm", "role": "patch"}\n{"path": "x.pgm", "role": "patch"}\n', encoding="utf-8")
    with pytest.raises(InputError):
        read_manifest(str(path), check_files=False)

    with pytest.raises(ValueError):
        ManifestEntry(path="y", role="mask")


def small_checkpoint():
    critic = build_mlp_critic(3, np.random.default_rng(0), hidden=(4,), dtype="f64")
    optimizer = AdamState.for_params(critic.params, 1e-3, (0.0, 0.9))
    adam_step(critic.params, {name: np.ones_like(p.data) for name, p in critic.params}, optimizer)
    streams = RngStreams(5)
    streams.stream("latent").random(3)
    return critic, network_checkpoint(critic, optimizer, streams.get_state(), iteration=7, metadata={"role": "critic"})


def test_checkpoint_bytes_are_stable(tmp_path):
    """save -> load -> save reproduces the file byte for byte"""
    _, checkpoint = small_checkpoint()
    path = str(tmp_path / "critic.ckpt")
    first = save_checkpoint(path, checkpoint)
    second = encode_checkpoint(load_checkpoint(path))
    assert first == second
    assert first[:4] == b"NNCK"


def test_checkpoint_header_offsets():
    """Tensor count follows the version; the first record starts at byte 12"""
    _, checkpoint = small_checkpoint()
    data = encode_checkpoint(checkpoint)
    name, array = next(iter(checkpoint.tensors.items()))
    name_bytes = name.encode("utf-8")
    assert data[0:4] == b"NNCK"
    assert struct.unpack_from("<I", data, 4) == (1,)
    assert struct.unpack_from("<I", data, 8) == (len(checkpoint.tensors),)
    assert struct.unpack_from("<H", data, 12) == (len(name_bytes),)
    offset = 14 + len(name_bytes)
    assert data[14:offset] == name_bytes
    assert struct.unpack_from("<BB", data, offset) == (2, array.ndim)
    offset += 2
    assert struct.unpack_from(f"<{array.ndim}I", data, offset) == array.shape
    offset += 4 * array.ndim
    first = np.frombuffer(data, dtype="<f8", count=array.size, offset=offset)
    np.testing.assert_array_equal(first.reshape(array.shape), array)
    topology = json.dumps(checkpoint.topology, sort_keys=True, separators=(",", ":")).encode("utf-8")
    assert data.endswith(struct.pack("<I", len(topology)) + topology)


def test_checkpoint_restores_network_and_optimizer():
    critic, checkpoint = small_checkpoint()
    decoded = decode_checkpoint(encode_checkpoint(checkpoint))
    restored = restore_network(decoded)
    x = np.random.default_rng(1).standard_normal((5, 3))
    np.testing.assert_array_equal(restored.forward(x).data, critic.forward(x).data)
    optimizer = restore_optimizer(decoded)
    assert optimizer.t == 1 and optimizer.beta1 == 0.0
    assert decoded.iteration == 7 and decoded.metadata == {"role": "critic"}

    streams = RngStreams(5)
    streams.set_state(decoded.rng_state)
    expected = RngStreams(5)
    expected.stream("latent").random(3)
    assert streams.stream("latent").random() == expected.stream("latent").random()


def test_truncated_checkpoint_names_the_record():
    _, checkpoint = small_checkpoint()
    data = encode_checkpoint(checkpoint)
    with pytest.raises(CheckpointError) as excinfo:
        decode_checkpoint(data[:-3])
    assert excinfo.value.record == "topology"
    with pytest.raises(CheckpointError):
        decode_checkpoint(b"XXXX" + data[4:])
    with pytest.raises(CheckpointError):
        decode_checkpoint(data + b"\x00")


def test_synth_stack_range_and_box():
    """Synthetic stacks use most of the intensity range and keep the embryo in frame"""
    stack, bbox = synth_stack(np.random.default_rng(0), size=64, n_slices=4)
    assert stack.voxels.shape == (4, 64, 64)
    assert (int(stack.voxels.max()) - int(stack.voxels.min())) >= 0.6 * 255
    assert bbox.inside(64, 64) and bbox.fits(16)


def test_synth_corpus_files_and_determinism(tmp_path):
    out_dir = str(tmp_path / "corpus")
    stacks, entries = synth_corpus(2, 3, 32, np.random.default_rng(1), n_slices=4, out_dir=out_dir)
    assert len(stacks) == len(entries) == 6
    manifest = read_manifest(os.path.join(out_dir, "manifest.jsonl"))
    assert [entry.time_min for entry in manifest[:3]] == [61, 62, 63]
    assert read_pgm(os.path.join(out_dir, manifest[0].path)).shape == (4 * 32, 32)

    again, _ = synth_corpus(2, 3, 32, np.random.default_rng(1), n_slices=4)
    for first, second in zip(stacks, again):
        np.testing.assert_array_equal(first.voxels, second.voxels)


def test_labeled_patches_are_balanced():
    patches = synth_labeled_patches(11, 16, np.random.default_rng(0))
    assert len(patches) == 11
    assert int(patches.labels.sum()) == 5
    assert patches.n_classes == 2


def test_patch_set_roundtrip_through_files(tmp_path):
    patches = synth_labeled_patches(6, 16, np.random.default_rng(2))
    manifest_path = write_patch_set(patches, str(tmp_path), prefix="train_")
    assert os.path.exists(tmp_path / "patches" / "train_00000.pgm")
    loaded = load_patch_set(manifest_path)
    np.testing.assert_array_equal(loaded.pixels, patches.pixels)
    np.testing.assert_array_equal(loaded.labels, patches.labels)


def test_patch_set_rejects_mixed_sizes():
    with pytest.raises(ValueError):
        PatchSet(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        PatchSet(np.zeros((2, 4, 4)), labels=[0])


def test_montage_layout():
    images = [np.full((2, 2), v, dtype=np.uint8) for v in (10, 20, 30)]
    sheet = montage(images, cols=2, separator=1)
    assert sheet.shape == (5, 5)
    assert sheet[0, 2] == 255 and sheet[2, 0] == 255
    assert sheet[3, 0] == 30 and sheet[3, 3] == 255
    with pytest.raises(ValueError):
        montage([])


def test_batch_plan_depends_only_on_step():
    patches = synth_labeled_patches(10, 16, np.random.default_rng(0))
    plan = BatchPlan(patches, 4, RngStreams(3))
    assert plan.batches_per_epoch == 2
    first_images, first_labels, first_indices = plan.batch(5)
    other = BatchPlan(patches, 4, RngStreams(3))
    images, labels, indices = other.batch(5)
    np.testing.assert_array_equal(images, first_images)
    np.testing.assert_array_equal(labels, first_labels)
    np.testing.assert_array_equal(indices, first_indices)
    assert images.shape == (4, 1, 16, 16)
    # Each epoch visits distinct patches
    epoch = np.concatenate([plan.indices(0), plan.indices(1)])
    assert len(set(epoch.tolist())) == 8


def test_trailing_batch_needs_two_samples():
    patches = synth_labeled_patches(9, 16, np.random.default_rng(0))
    assert BatchPlan(patches, 4, RngStreams(0), drop_last=False).batches_per_epoch == 2
    assert BatchPlan(patches, 3, RngStreams(0), drop_last=False).batches_per_epoch == 3
    assert BatchPlan(synth_labeled_patches(10, 16, np.random.default_rng(0)), 4, RngStreams(0), drop_last=False).batches_per_epoch == 3


def test_prefetch_loader_matches_plan():
    patches = synth_labeled_patches(8, 16, np.random.default_rng(0))
    plan = BatchPlan(patches, 2, RngStreams(1))
    with PrefetchLoader(plan, start_step=3, n_steps=5, depth=2) as loader:
        items = list(loader)
    assert [step for step, _ in items] == [3, 4, 5, 6, 7]
    for step, (images, _, _) in items:
        np.testing.assert_array_equal(images, plan.batch(step)[0])


def test_write_pgm_roundtrip(tmp_path):
    image = np.random.default_rng(0).integers(0, 65536, (3, 5)).astype(np.uint16)
    path = str(tmp_path / "x.pgm")
    write_pgm(path, image)
    np.testing.assert_array_equal(read_pgm(path), image)
