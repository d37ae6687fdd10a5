"""Supervised training of the patch classifier"""

import csv
import os
from dataclasses import astuple, dataclass, field
from typing import List

import numpy as np

from ..common.errors import NumericalError
from ..common.log import log
from ..common.rng import RngStreams
from ..common.utils import ensure_directory
from ..dataio.checkpoint import Checkpoint, network_checkpoint, save_checkpoint
from ..dataio.loader import BatchPlan
from ..models.builders import build_classifier
from ..models.layers import NetworkConfig
from ..models.network import Network
from ..nn.adam import AdamState, adam_step
from ..tensor import backward, cross_entropy, no_grad, resolve_dtype

HISTORY_HEADER = ("epoch", "train_loss", "train_accuracy", "test_accuracy")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_accuracy: float


@dataclass
class ClassifierResult:
    network: Network
    checkpoint: Checkpoint
    history: List[EpochStats] = field(default_factory=list)

    @property
    def accuracy_trace(self):
        return [stats.test_accuracy for stats in self.history]


def accuracy(logits, labels):
    """Fraction of rows whose arg-max matches the label"""
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("Accuracy of an empty batch is undefined")
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def predict_logits(network, images, batch_size=64):
    """Eval-mode logits for images [N, 1, H, W], computed in chunks"""
    chunks = []
    with no_grad():
        for start in range(0, len(images), batch_size):
            chunks.append(network.forward(images[start : start + batch_size], training=False).data)
    return np.concatenate(chunks) if chunks else np.zeros((0, network.output_shape[0]))


def write_history(path, history):
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(HISTORY_HEADER)
        for stats in history:
            writer.writerow([stats.epoch] + [repr(v) for v in astuple(stats)[1:]])


def train_classifier(train, test, cfg, net_cfg=None, out_dir=None):
    """Cross-entropy training with per-epoch test accuracy.

    Augmentation (when enabled in ``cfg``) touches training batches only.
    A trailing batch of fewer than two patches is skipped because batch
    normalization needs two samples."""
    log_identifier = "[embryoforge.train_classifier] "
    if train is None or len(train) == 0 or test is None or len(test) == 0:
        raise ValueError("Training and test splits must both be non-empty")
    if not train.labeled or not test.labeled:
        raise ValueError("Classifier training needs labeled patches")
    if train.size != test.size:
        raise ValueError(f"Train patches are {train.size} px, test patches {test.size} px")

    dtype = resolve_dtype(cfg.dtype)
    streams = RngStreams(cfg.seed)
    net_cfg = net_cfg or NetworkConfig(input_size=train.size, dropout_rate=cfg.dropout_rate)
    n_classes = max(2, train.n_classes, test.n_classes)
    network = build_classifier(net_cfg, n_classes, streams.stream("init"), dtype=cfg.dtype)
    optimizer = AdamState.for_params(network.params, cfg.lr_classifier, cfg.betas_classifier)
    plan = BatchPlan(
        train, cfg.batch_size, streams, augment=cfg.augment_config(), drop_last=False, min_batch=2, dtype=dtype
    )
    dropout_rng = streams.stream("dropout")
    train_images = train.normalized(dtype)
    test_images = test.normalized(dtype)

    log.info(
        "%sTraining on %d patches (%d classes, %d parameters) for %d epochs",
        log_identifier,
        len(train),
        n_classes,
        network.num_parameters(),
        cfg.epochs,
    )
    history = []
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        losses = []
        for _ in range(plan.batches_per_epoch):
            images, labels, _ = plan.batch(step)
            step += 1
            logits = network.forward(images, training=True, rng=dropout_rng)
            loss = cross_entropy(logits, labels)
            if not np.isfinite(loss.item()):
                raise NumericalError(f"Non-finite classifier loss in epoch {epoch}")
            grads = backward(loss, network.params.tensors())
            adam_step(network.params, grads, optimizer)
            losses.append(loss.item())
        stats = EpochStats(
            epoch=epoch,
            train_loss=float(np.mean(losses)),
            train_accuracy=accuracy(predict_logits(network, train_images), train.labels),
            test_accuracy=accuracy(predict_logits(network, test_images), test.labels),
        )
        history.append(stats)
        log.info(
            "%sEpoch %d: loss %.4f, train accuracy %.3f, test accuracy %.3f",
            log_identifier,
            epoch,
            stats.train_loss,
            stats.train_accuracy,
            stats.test_accuracy,
        )

    checkpoint = network_checkpoint(
        network,
        optimizer,
        streams.get_state(),
        iteration=step,
        metadata={"role": "classifier", "train_config": cfg.to_dict(), "n_classes": n_classes},
    )
    if out_dir:
        ensure_directory(out_dir)
        save_checkpoint(os.path.join(out_dir, "classifier.ckpt"), checkpoint)
        write_history(os.path.join(out_dir, "accuracy.csv"), history)
    return ClassifierResult(network=network, checkpoint=checkpoint, history=history)
