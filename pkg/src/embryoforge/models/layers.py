"""Layer specifications and network configuration"""

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..common.utils import is_power_of_two
from ..tensor.conv import output_size, padding_amount

LAYER_KINDS = (
    "conv",
    "conv_transpose",
    "dense",
    "batch_norm",
    "layer_norm",
    "leaky_relu",
    "tanh",
    "sigmoid",
    "dropout",
    "flatten",
    "reshape",
)
CRITIC_NORMS = ("none", "layer_norm", "batch_norm")


@dataclass
class LayerSpec:
    kind: str
    name: str = ""
    in_channels: int = None
    out_channels: int = None
    in_features: int = None
    out_features: int = None
    channels: int = None
    kernel: int = 4
    stride: int = 2
    padding: str = "half"
    bias: bool = True
    rate: float = 0.0
    slope: float = 0.2
    shape: tuple = None
    eps: float = 1e-5
    momentum: float = 0.9

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"Unknown layer kind '{self.kind}'")
        if self.shape is not None:
            self.shape = tuple(int(s) for s in self.shape)

    def to_dict(self):
        data = asdict(self)
        if data["shape"] is not None:
            data["shape"] = list(data["shape"])
        return data

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})

    def parameter_shapes(self):
        """(name, shape, initializer, fan_in) for each trainable tensor of this layer"""
        k = self.kernel
        if self.kind == "conv":
            yield "kernel", (self.out_channels, self.in_channels, k, k), "weight", self.in_channels * k * k
            if self.bias:
                yield "bias", (self.out_channels,), "zeros", None
        elif self.kind == "conv_transpose":
            yield "kernel", (self.in_channels, self.out_channels, k, k), "weight", self.in_channels * k * k
            if self.bias:
                yield "bias", (self.out_channels,), "zeros", None
        elif self.kind == "dense":
            yield "weight", (self.in_features, self.out_features), "weight", self.in_features
            if self.bias:
                yield "bias", (self.out_features,), "zeros", None
        elif self.kind in ("batch_norm", "layer_norm"):
            yield "gamma", (self.channels,), "ones", None
            yield "beta", (self.channels,), "zeros", None

    def output_shape(self, input_shape):
        """Shape after this layer (batch axis excluded); ValueError names the layer on mismatch"""
        input_shape = tuple(input_shape)
        label = f"Layer '{self.name}' ({self.kind})"
        if self.kind in ("conv", "conv_transpose"):
            if len(input_shape) != 3 or input_shape[0] != self.in_channels:
                raise ValueError(
                    f"{label} expects input with {self.in_channels} channels [C, H, W], got {input_shape}"
                )
            _, h, w = input_shape
            if self.kind == "conv_transpose":
                return (self.out_channels, h * self.stride, w * self.stride)
            pad = padding_amount(self.kernel, self.padding)
            out_h = output_size(h, self.kernel, self.stride, pad)
            out_w = output_size(w, self.kernel, self.stride, pad)
            if out_h < 1 or out_w < 1:
                raise ValueError(f"{label} kernel {self.kernel} does not fit input {input_shape}")
            return (self.out_channels, out_h, out_w)
        if self.kind == "dense":
            if len(input_shape) != 1 or input_shape[0] != self.in_features:
                raise ValueError(f"{label} expects {self.in_features} input features, got shape {input_shape}")
            return (self.out_features,)
        if self.kind in ("batch_norm", "layer_norm"):
            if not input_shape or input_shape[0] != self.channels:
                raise ValueError(f"{label} expects {self.channels} channels, got shape {input_shape}")
            return input_shape
        if self.kind == "flatten":
            return (int(np.prod(input_shape)),)
        if self.kind == "reshape":
            if int(np.prod(input_shape)) != int(np.prod(self.shape)):
                raise ValueError(f"{label} cannot reshape {input_shape} to {self.shape}")
            return self.shape
        return input_shape


def infer_shapes(specs, input_shape):
    """Output shape of every layer, checking that the sequence composes"""
    shapes = []
    names = set()
    current = tuple(input_shape)
    for spec in specs:
        if spec.name in names:
            raise ValueError(f"Duplicate layer name '{spec.name}'")
        names.add(spec.name)
        current = spec.output_shape(current)
        shapes.append(current)
    return shapes


@dataclass
class NetworkConfig:
    input_size: int = 128
    base_filters: int = 32
    width_scale: float = 1.0
    critic_norm: str = "none"
    hidden_units: int = 1024
    dropout_rate: float = 0.5
    slope: float = 0.2
    in_channels: int = 1

    def __post_init__(self):
        if not isinstance(self.input_size, int) or self.input_size < 16 or not is_power_of_two(self.input_size):
            raise ValueError(f"input_size must be a power of two >= 16, got {self.input_size}")
        if not 0.0 < self.width_scale <= 1.0:
            raise ValueError(f"width_scale must be in (0, 1], got {self.width_scale}")
        if self.critic_norm not in CRITIC_NORMS:
            raise ValueError(f"critic_norm must be one of {CRITIC_NORMS}, got '{self.critic_norm}'")
        if self.base_filters < 1 or self.hidden_units < 1:
            raise ValueError("base_filters and hidden_units must be positive")

    @property
    def n_conv(self):
        return int(math.log2(self.input_size)) - 2

    def conv_channels(self, index):
        return max(1, int(round(self.base_filters * (2**index) * self.width_scale)))

    def hidden(self):
        return max(1, int(round(self.hidden_units * self.width_scale)))

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in (data or {}).items() if key in known})

    def to_dict(self):
        return asdict(self)
