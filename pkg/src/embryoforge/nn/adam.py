"""Adam with bias correction"""

from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from ..tensor import Tensor


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: OrderedDict = field(default_factory=OrderedDict)
    v: OrderedDict = field(default_factory=OrderedDict)

    @classmethod
    def for_params(cls, params, lr, betas=(0.9, 0.999), eps=1e-8):
        state = cls(lr=float(lr), beta1=float(betas[0]), beta2=float(betas[1]), eps=float(eps))
        for name, param in params:
            state.m[name] = np.zeros_like(param.data)
            state.v[name] = np.zeros_like(param.data)
        return state

    def hyperparameters(self):
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps, "t": self.t}

    def to_arrays(self):
        """(hyperparameters, ordered moment arrays named "m.<param>" / "v.<param>")"""
        arrays = OrderedDict()
        for name in self.m:
            arrays[f"m.{name}"] = self.m[name]
            arrays[f"v.{name}"] = self.v[name]
        return self.hyperparameters(), arrays

    @classmethod
    def from_arrays(cls, hyperparameters, arrays):
        state = cls(
            lr=float(hyperparameters["lr"]),
            beta1=float(hyperparameters["beta1"]),
            beta2=float(hyperparameters["beta2"]),
            eps=float(hyperparameters["eps"]),
            t=int(hyperparameters["t"]),
        )
        for key, value in arrays.items():
            moment, _, name = key.partition(".")
            if moment not in ("m", "v") or not name:
                raise ValueError(f"Unexpected optimizer array '{key}'")
            getattr(state, moment)[name] = np.array(value)
        return state


def adam_step(params, grads, state):
    """One Adam update of every parameter in place; returns (params, state).

    ``grads`` maps parameter names (or the parameter tensors themselves) to
    gradients and must cover every parameter."""
    by_name = {}
    for name, param in params:
        grad = grads.get(name)
        if grad is None:
            grad = grads.get(param)
        if grad is None:
            raise ValueError(f"Missing gradient for parameter '{name}'")
        by_name[name] = grad.data if isinstance(grad, Tensor) else np.asarray(grad)

    state.t += 1
    correction1 = 1.0 - state.beta1**state.t
    correction2 = 1.0 - state.beta2**state.t
    for name, param in params:
        grad = by_name[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param.data)
            state.v[name] = np.zeros_like(param.data)
        m = state.beta1 * state.m[name] + (1.0 - state.beta1) * grad
        v = state.beta2 * state.v[name] + (1.0 - state.beta2) * grad * grad
        state.m[name] = m.astype(param.dtype)
        state.v[name] = v.astype(param.dtype)
        m_hat = m / correction1
        v_hat = v / correction2
        param.data = (param.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(param.dtype)
    return params, state
