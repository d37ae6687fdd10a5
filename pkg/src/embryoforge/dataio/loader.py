"""Batch production on a background thread.

Batch ``step`` depends only on (seed, step): the shuffle of its epoch comes
from ``RngStreams.for_step("data_order", epoch)`` and its augmentation from
``for_step("augment", step)``. How far the thread runs ahead therefore has
no effect on what the training loop sees, and a run resumed at step k sees
the same batches as an uninterrupted one."""

import queue
import threading

import numpy as np

from ..common.log import log
from ..imaging.augment import apply_augmentation, normalize_pixels, sample_augment_params

_DONE = object()


class BatchPlan:
    """Which patches form batch ``step`` and how they are augmented"""

    def __init__(self, dataset, batch_size, streams, augment=None, drop_last=True, min_batch=2, dtype=np.float32):
        if len(dataset) == 0:
            raise ValueError("Cannot draw batches from an empty dataset")
        if batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {batch_size}")
        self.dataset = dataset
        self.batch_size = int(batch_size)
        self.streams = streams
        self.augment = augment
        self.dtype = dtype
        full, remainder = divmod(len(dataset), self.batch_size)
        # A trailing batch is kept only when allowed and big enough for batch statistics
        self.last_size = remainder if (not drop_last and remainder >= min_batch) else 0
        self.batches_per_epoch = full + (1 if self.last_size else 0)
        if self.batches_per_epoch == 0:
            raise ValueError(
                f"Dataset of {len(dataset)} patches yields no batch of size {self.batch_size}"
            )
        self._order_cache = {}

    def order(self, epoch):
        if epoch not in self._order_cache:
            self._order_cache = {epoch: self.streams.for_step("data_order", epoch).permutation(len(self.dataset))}
        return self._order_cache[epoch]

    def indices(self, step):
        epoch, position = divmod(step, self.batches_per_epoch)
        start = position * self.batch_size
        return self.order(epoch)[start : start + self.batch_size]

    def batch(self, step):
        """(images [B, 1, H, W] in [-1, 1], labels or None, indices)"""
        indices = self.indices(step)
        pixels = self.dataset.pixels[indices]
        if self.augment is not None:
            rng = self.streams.for_step("augment", step)
            pixels = np.stack(
                [
                    apply_augmentation(image, sample_augment_params(rng, self.augment, self.dataset.bit_depth), self.dataset.bit_depth)
                    for image in pixels
                ]
            )
        images = normalize_pixels(pixels, self.dataset.bit_depth, self.dtype)[:, None]
        labels = None if self.dataset.labels is None else self.dataset.labels[indices]
        return images, labels, indices


class PrefetchLoader:
    """Iterate over batches [start_step, start_step + n_steps) produced on a worker thread"""

    def __init__(self, plan, start_step=0, n_steps=None, depth=4):
        self.plan = plan
        self.start_step = int(start_step)
        self.n_steps = n_steps
        self.queue = queue.Queue(maxsize=max(1, depth))
        self.stop_signal = threading.Event()
        self.thread = None

    def _produce(self):
        step = self.start_step
        try:
            while not self.stop_signal.is_set():
                if self.n_steps is not None and step >= self.start_step + self.n_steps:
                    break
                item = (step, self.plan.batch(step))
                while not self.stop_signal.is_set():
                    try:
                        self.queue.put(item, timeout=0.1)
                        break
                    except queue.Full:
                        continue
                step += 1
        except Exception as e:  # pylint: disable=broad-except
            log.error("Batch loader failed at step %d: %s", step, e)
            self.queue.put(e)
            return
        self.queue.put(_DONE)

    def start(self):
        if self.thread is None:
            self.thread = threading.Thread(target=self._produce, name="batch-loader", daemon=True)
            self.thread.start()
        return self

    def __iter__(self):
        self.start()
        while True:
            item = self.queue.get()
            if item is _DONE:
                return
            if isinstance(item, Exception):
                raise item
            yield item

    def close(self):
        self.stop_signal.set()
        if self.thread is not None:
            # Unblock a producer waiting on a full queue
            while self.thread.is_alive():
                try:
                    self.queue.get(timeout=0.1)
                except queue.Empty:
                    pass
            self.thread = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.close()
        return False
