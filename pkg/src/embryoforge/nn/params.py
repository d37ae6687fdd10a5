"""Named trainable parameters and their initialization"""

from collections import OrderedDict

import numpy as np

from ..tensor import Tensor


class ParamSet:
    """Ordered, uniquely named trainable tensors ("conv1.kernel", "bn1.gamma", ...)"""

    def __init__(self, items=None):
        self._params = OrderedDict()
        for name, value in items or []:
            self.add(name, value)

    def add(self, name, value):
        if name in self._params:
            raise ValueError(f"Duplicate parameter name '{name}'")
        if not isinstance(value, Tensor):
            value = Tensor(value)
        value.requires_grad = True
        self._params[name] = value
        return value

    def __iter__(self):
        return iter(self._params.items())

    def __len__(self):
        return len(self._params)

    def __contains__(self, name):
        return name in self._params

    def __getitem__(self, name):
        return self._params[name]

    def get(self, name, default=None):
        return self._params.get(name, default)

    def names(self):
        return list(self._params.keys())

    def tensors(self):
        return list(self._params.values())

    def num_parameters(self):
        return int(sum(p.size for p in self._params.values()))

    def state_dict(self):
        return OrderedDict((name, p.data.copy()) for name, p in self._params.items())

    def load_state_dict(self, state):
        missing = [name for name in self._params if name not in state]
        if missing:
            raise ValueError(f"State is missing parameters: {', '.join(missing)}")
        for name, param in self._params.items():
            array = np.asarray(state[name])
            if array.shape != param.shape:
                raise ValueError(f"Parameter '{name}' has shape {param.shape}, state has {array.shape}")
            param.data = np.ascontiguousarray(array, dtype=param.dtype)

    def copy(self):
        return ParamSet((name, Tensor(p.data.copy())) for name, p in self._params.items())


def he_normal(rng, shape, fan_in, dtype=np.float32):
    """N(0, 2 / fan_in) samples"""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


def init_params(specs, rng, input_shape, dtype=np.float32):
    """Create the ParamSet for a layer-spec sequence.

    Conv and dense weights are He-normal, biases zero, normalization gamma one
    and beta zero. Shapes are checked end to end from ``input_shape`` (without
    the batch axis); the first inconsistent layer is named in the error."""
    from ..models.layers import infer_shapes

    infer_shapes(specs, input_shape)
    params = ParamSet()
    for spec in specs:
        for name, shape, kind, fan_in in spec.parameter_shapes():
            full_name = f"{spec.name}.{name}"
            if kind == "weight":
                value = he_normal(rng, shape, fan_in, dtype)
            elif kind == "ones":
                value = np.ones(shape, dtype=dtype)
            else:
                value = np.zeros(shape, dtype=dtype)
            params.add(full_name, Tensor(value, dtype=dtype))
    return params
