"""A sequential network: layer specs, their parameters and batch-norm buffers"""

from collections import OrderedDict

import numpy as np

from ..common.errors import DimensionError
from ..nn.params import ParamSet, init_params
from ..tensor import (
    RunningStats,
    Tensor,
    batch_norm,
    conv2d,
    conv2d_transpose,
    dense,
    dropout,
    layer_norm,
    leaky_relu,
    ops,
    resolve_dtype,
)
from .layers import LayerSpec, infer_shapes

DTYPE_NAMES = {np.dtype(np.float32): "f32", np.dtype(np.float64): "f64"}


class Network:
    """Immutable layer sequence plus its ParamSet.

    ``input_shape`` excludes the batch axis. Batch-norm layers keep running
    statistics as buffers named "<layer>.running_mean" / "<layer>.running_var";
    they change only in training-mode forward passes."""

    def __init__(self, specs, input_shape, params=None, rng=None, dtype="f32", kind="network"):
        self.specs = list(specs)
        self.input_shape = tuple(int(s) for s in input_shape)
        self.kind = kind
        self.dtype = resolve_dtype(dtype)
        self.shapes = infer_shapes(self.specs, self.input_shape)
        if params is None:
            if rng is None:
                raise ValueError("Network needs either params or an init random generator")
            params = init_params(self.specs, rng, self.input_shape, self.dtype)
        self.params = params
        self.buffers = OrderedDict(
            (spec.name, RunningStats(spec.channels, spec.momentum, self.dtype))
            for spec in self.specs
            if spec.kind == "batch_norm"
        )

    # -- structure ----------------------------------------------------------

    @property
    def output_shape(self):
        return self.shapes[-1] if self.shapes else self.input_shape

    @property
    def has_batch_norm(self):
        return bool(self.buffers)

    def num_parameters(self):
        return self.params.num_parameters()

    def conv_channels(self):
        return [spec.out_channels for spec in self.specs if spec.kind in ("conv", "conv_transpose")]

    def layer_kinds(self):
        return [spec.kind for spec in self.specs]

    def topology(self):
        """JSON-serializable description; enough to rebuild the network"""
        return {
            "kind": self.kind,
            "dtype": DTYPE_NAMES[self.dtype],
            "input_shape": list(self.input_shape),
            "layers": [spec.to_dict() for spec in self.specs],
        }

    @classmethod
    def from_topology(cls, topology, params_state=None, buffer_state=None):
        specs = [LayerSpec.from_dict(layer) for layer in topology["layers"]]
        dtype = resolve_dtype(topology.get("dtype", "f32"))
        params = ParamSet()
        for spec in specs:
            for name, shape, _, _ in spec.parameter_shapes():
                params.add(f"{spec.name}.{name}", Tensor(np.zeros(shape), dtype=dtype))
        network = cls(specs, topology["input_shape"], params=params, dtype=dtype, kind=topology.get("kind", "network"))
        if params_state is not None:
            network.params.load_state_dict(params_state)
        if buffer_state is not None:
            network.load_buffer_state(buffer_state)
        return network

    def buffer_state(self):
        state = OrderedDict()
        for name, stats in self.buffers.items():
            state[f"{name}.running_mean"] = stats.mean.copy()
            state[f"{name}.running_var"] = stats.var.copy()
        return state

    def load_buffer_state(self, state):
        for name, stats in self.buffers.items():
            try:
                mean = np.asarray(state[f"{name}.running_mean"])
                var = np.asarray(state[f"{name}.running_var"])
            except KeyError as e:
                raise ValueError(f"Buffer state is missing {e}") from e
            if mean.shape != stats.mean.shape or var.shape != stats.var.shape:
                raise ValueError(f"Buffer shapes for '{name}' do not match the network")
            stats.mean = mean.astype(self.dtype)
            stats.var = var.astype(self.dtype)

    # -- evaluation ---------------------------------------------------------

    def forward(self, x, training=False, rng=None):
        """Run a batch [N, *input_shape] through the layers.

        ``rng`` drives dropout and is required only when training with a
        dropout layer."""
        if not isinstance(x, Tensor):
            x = Tensor(x, dtype=self.dtype)
        if tuple(x.shape[1:]) != self.input_shape:
            raise DimensionError(
                f"{self.kind} expects input of shape [N, {', '.join(map(str, self.input_shape))}], got {x.shape}"
            )
        for spec in self.specs:
            x = self._apply(spec, x, training, rng)
        return x

    __call__ = forward

    def _param(self, spec, name):
        return self.params.get(f"{spec.name}.{name}")

    def _apply(self, spec, x, training, rng):
        kind = spec.kind
        if kind in ("conv", "conv_transpose"):
            if kind == "conv":
                out = conv2d(x, self._param(spec, "kernel"), stride=spec.stride, padding=spec.padding)
            else:
                out = conv2d_transpose(x, self._param(spec, "kernel"), stride=spec.stride, padding=spec.padding)
            bias = self._param(spec, "bias")
            if bias is not None:
                out = ops.add(out, ops.reshape(bias, (1, spec.out_channels, 1, 1)))
            return out
        if kind == "dense":
            return dense(x, self._param(spec, "weight"), self._param(spec, "bias"))
        if kind == "batch_norm":
            return batch_norm(
                x,
                self._param(spec, "gamma"),
                self._param(spec, "beta"),
                eps=spec.eps,
                training=training,
                running=self.buffers[spec.name],
            )
        if kind == "layer_norm":
            return layer_norm(x, self._param(spec, "gamma"), self._param(spec, "beta"), eps=spec.eps)
        if kind == "leaky_relu":
            return leaky_relu(x, spec.slope)
        if kind == "tanh":
            return ops.tanh(x)
        if kind == "sigmoid":
            return ops.sigmoid(x)
        if kind == "dropout":
            return dropout(x, spec.rate, training, rng)
        if kind == "flatten":
            return ops.flatten(x)
        if kind == "reshape":
            return ops.reshape(x, (x.shape[0],) + spec.shape)
        raise ValueError(f"Unknown layer kind '{kind}'")

    def __repr__(self):
        return f"Network({self.kind}, layers={len(self.specs)}, parameters={self.num_parameters()})"
