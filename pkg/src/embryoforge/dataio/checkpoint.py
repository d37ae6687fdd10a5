"""Binary checkpoint format.

Layout, little-endian throughout:

    b"NNCK" | u32 version (1)
    u32 count  | count x tensor record
    u32 length | optimizer hyperparameter JSON ("null" when absent)
    u32 count  | count x tensor record (optimizer moments)
    u32 length | RNG stream state JSON
    u64 iteration
    u32 length | metadata JSON
    u32 length | topology JSON

A tensor record is: u16 name length | name (UTF-8) | u8 dtype tag | u8 rank |
rank x u32 dims | raw data. JSON blocks are written with sorted keys and
compact separators so that save -> load -> save gives identical bytes.
"""

import json
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..common.errors import CheckpointError, InputError
from ..models.network import Network
from ..nn.adam import AdamState

MAGIC = b"NNCK"
VERSION = 1
DTYPE_TAGS = {
    1: np.dtype("<f4"),
    2: np.dtype("<f8"),
    3: np.dtype("<i8"),
    4: np.dtype("<u1"),
    5: np.dtype("<u2"),
}
_TAG_FOR_KIND = {(dtype.kind, dtype.itemsize): tag for tag, dtype in DTYPE_TAGS.items()}


@dataclass
class Checkpoint:
    topology: dict
    tensors: OrderedDict = field(default_factory=OrderedDict)
    optimizer: Optional[dict] = None
    optimizer_tensors: OrderedDict = field(default_factory=OrderedDict)
    rng_state: dict = field(default_factory=dict)
    iteration: int = 0
    metadata: dict = field(default_factory=dict)


# -- encoding ---------------------------------------------------------------------


def _json_bytes(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _block(payload):
    return struct.pack("<I", len(payload)) + payload


def _tensor_record(name, array):
    array = np.asarray(array)
    tag = _TAG_FOR_KIND.get((array.dtype.kind, array.dtype.itemsize))
    if tag is None:
        raise ValueError(f"Tensor '{name}' has unsupported dtype {array.dtype}")
    name_bytes = name.encode("utf-8")
    if len(name_bytes) > 0xFFFF or array.ndim > 0xFF:
        raise ValueError(f"Tensor '{name}' has a name or rank too large to store")
    parts = [
        struct.pack("<H", len(name_bytes)),
        name_bytes,
        struct.pack("<BB", tag, array.ndim),
        struct.pack(f"<{array.ndim}I", *array.shape),
        np.ascontiguousarray(array, dtype=DTYPE_TAGS[tag]).tobytes(),
    ]
    return b"".join(parts)


def _tensor_section(tensors):
    return struct.pack("<I", len(tensors)) + b"".join(
        _tensor_record(name, array) for name, array in tensors.items()
    )


def encode_checkpoint(checkpoint):
    return b"".join(
        [
            MAGIC,
            struct.pack("<I", VERSION),
            _tensor_section(checkpoint.tensors),
            _block(_json_bytes(checkpoint.optimizer)),
            _tensor_section(checkpoint.optimizer_tensors),
            _block(_json_bytes(checkpoint.rng_state)),
            struct.pack("<Q", int(checkpoint.iteration)),
            _block(_json_bytes(checkpoint.metadata)),
            _block(_json_bytes(checkpoint.topology)),
        ]
    )


# -- decoding ---------------------------------------------------------------------


class _Reader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, size, record):
        if self.offset + size > len(self.data):
            raise CheckpointError(
                f"Truncated checkpoint: needed {size} bytes at offset {self.offset}, "
                f"{len(self.data) - self.offset} left",
                record,
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt, record):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), record))

    def json_block(self, record):
        (length,) = self.unpack("<I", record)
        try:
            return json.loads(self.take(length, record).decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as e:
            raise CheckpointError(f"Invalid JSON block: {e}", record) from e

    def tensor_section(self, section):
        (count,) = self.unpack("<I", f"{section} count")
        tensors = OrderedDict()
        for index in range(count):
            record = f"{section}[{index}]"
            (name_length,) = self.unpack("<H", record)
            try:
                name = self.take(name_length, record).decode("utf-8")
            except UnicodeDecodeError as e:
                raise CheckpointError("Tensor name is not UTF-8", record) from e
            record = f"{section} '{name}'"
            tag, rank = self.unpack("<BB", record)
            if tag not in DTYPE_TAGS:
                raise CheckpointError(f"Unknown dtype tag {tag}", record)
            shape = self.unpack(f"<{rank}I", record)
            dtype = DTYPE_TAGS[tag]
            size = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
            raw = self.take(size, record)
            if name in tensors:
                raise CheckpointError("Duplicate tensor name", record)
            tensors[name] = np.frombuffer(raw, dtype=dtype).reshape(shape).astype(dtype.newbyteorder("="))
        return tensors


def decode_checkpoint(data):
    """Parse a whole checkpoint; nothing is returned unless every record decodes"""
    reader = _Reader(bytes(data))
    if reader.take(4, "magic") != MAGIC:
        raise CheckpointError("Bad magic number, not a checkpoint", "magic")
    (version,) = reader.unpack("<I", "version")
    if version != VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {version}", "version")
    tensors = reader.tensor_section("tensor")
    optimizer = reader.json_block("optimizer")
    optimizer_tensors = reader.tensor_section("optimizer tensor")
    rng_state = reader.json_block("rng")
    (iteration,) = reader.unpack("<Q", "iteration")
    metadata = reader.json_block("metadata")
    topology = reader.json_block("topology")
    if reader.offset != len(reader.data):
        raise CheckpointError(f"{len(reader.data) - reader.offset} trailing bytes", "end")
    return Checkpoint(
        topology=topology,
        tensors=tensors,
        optimizer=optimizer,
        optimizer_tensors=optimizer_tensors,
        rng_state=rng_state,
        iteration=iteration,
        metadata=metadata,
    )


def save_checkpoint(path, checkpoint):
    data = encode_checkpoint(checkpoint)
    with open(path, "wb") as file:
        file.write(data)
    return data


def load_checkpoint(path):
    try:
        with open(path, "rb") as file:
            data = file.read()
    except OSError as e:
        raise InputError(f"Cannot read checkpoint {path}: {e.strerror}") from e
    try:
        return decode_checkpoint(data)
    except CheckpointError as e:
        error = CheckpointError(f"{path}: {e.args[0]}")
        error.record = e.record
        raise error from e


# -- networks -----------------------------------------------------------------------


def network_checkpoint(network, optimizer=None, rng_state=None, iteration=0, metadata=None):
    """Capture parameters, batch-norm buffers, optimizer moments and RNG states"""
    tensors = OrderedDict(network.params.state_dict())
    tensors.update(network.buffer_state())
    hyperparameters, moments = (None, OrderedDict())
    if optimizer is not None:
        hyperparameters, moments = optimizer.to_arrays()
    return Checkpoint(
        topology=network.topology(),
        tensors=tensors,
        optimizer=hyperparameters,
        optimizer_tensors=OrderedDict(moments),
        rng_state=rng_state or {},
        iteration=int(iteration),
        metadata=dict(metadata or {}),
    )


def restore_network(checkpoint):
    try:
        network = Network.from_topology(checkpoint.topology)
        params = {name: checkpoint.tensors[name] for name in network.params.names()}
        network.params.load_state_dict(params)
        network.load_buffer_state(checkpoint.tensors)
    except (KeyError, ValueError, TypeError) as e:
        raise CheckpointError(f"Checkpoint does not match its topology: {e}", "tensor") from e
    return network


def restore_optimizer(checkpoint):
    if checkpoint.optimizer is None:
        return None
    try:
        return AdamState.from_arrays(checkpoint.optimizer, checkpoint.optimizer_tensors)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"Invalid optimizer state: {e}", "optimizer") from e
