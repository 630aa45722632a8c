"""Named parameter storage, Glorot initialization, and the Adam update."""

from __future__ import annotations

import math

import numpy as np

from gimtp.errors import ContractError
from gimtp.nn.tensor import Tensor


class ParameterStore:
    """Ordered collection of learnable tensors plus Adam moment buffers.

    Parameter creation order is part of the store's identity: the random
    number stream, checkpoint layout, and update order all follow it, which
    keeps training bit-reproducible for a fixed seed.
    """

    def __init__(self, seed: int = 0):
        self._params: dict[str, Tensor] = {}
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self._rng = np.random.default_rng(seed)
        self.step = 0

    def _register(self, name: str, data: np.ndarray) -> Tensor:
        if name in self._params:
            raise ContractError(f"duplicate parameter name: {name}")
        t = Tensor(data, requires_grad=True)
        self._params[name] = t
        self._m[name] = np.zeros_like(t.data)
        self._v[name] = np.zeros_like(t.data)
        return t

    def glorot(self, name: str, shape, fan: tuple[int, int] | None = None) -> Tensor:
        """Uniform init in +-sqrt(6 / (fan_in + fan_out))."""
        if fan is None:
            if len(shape) < 2:
                raise ContractError(f"{name}: supply fan for 1-d parameters")
            fan = (int(np.prod(shape[:-1])), shape[-1])
        limit = math.sqrt(6.0 / (fan[0] + fan[1]))
        data = self._rng.uniform(-limit, limit, size=shape)
        return self._register(name, data)

    def zeros(self, name: str, shape) -> Tensor:
        return self._register(name, np.zeros(shape))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def names(self):
        return list(self._params)

    def items(self):
        return self._params.items()

    def tensors(self):
        return list(self._params.values())

    def num_values(self) -> int:
        return sum(t.size for t in self._params.values())

    def zero_grads(self):
        for t in self._params.values():
            t.grad = None

    def adam_step(
        self,
        lr: float,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        """One bias-corrected Adam update over every parameter."""
        b1, b2 = betas
        self.step += 1
        t = self.step
        for name, p in self._params.items():
            if p.grad is None:
                raise ContractError(f"parameter {name!r} has no gradient")
            g = p.grad
            m = self._m[name]
            v = self._v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            m_hat = m / (1.0 - b1**t)
            v_hat = v / (1.0 - b2**t)
            p.data -= lr * m_hat / (np.sqrt(v_hat) + eps)

    # -- checkpoint plumbing -------------------------------------------------

    def moment_arrays(self):
        """(name, first, second) triples in registration order."""
        return [(n, self._m[n], self._v[n]) for n in self._params]

    def load_values(self, values: dict[str, np.ndarray]):
        for name, p in self._params.items():
            if name not in values:
                raise ContractError(f"checkpoint is missing parameter {name!r}")
            arr = np.asarray(values[name], dtype=np.float64)
            if arr.shape != p.data.shape:
                raise ContractError(
                    f"parameter {name!r}: checkpoint shape {arr.shape} "
                    f"!= model shape {p.data.shape}"
                )
            p.data = arr

    def load_moments(self, first: dict[str, np.ndarray], second: dict[str, np.ndarray]):
        for name in self._params:
            if name in first:
                self._m[name] = np.asarray(first[name], dtype=np.float64)
            if name in second:
                self._v[name] = np.asarray(second[name], dtype=np.float64)
