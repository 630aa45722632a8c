"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation that participates in differentiation builds a node in an
implicit tape; ``backward`` walks the tape in reverse topological order and
accumulates vector-Jacobian products into ``grad`` buffers.  Storage is a
row-major numpy array, so heavy lifting (matmul, reductions) runs in BLAS.

Broadcasting is deliberately restricted: operand shapes must agree on their
trailing axes, and any mismatch must be absorbed by absent or size-1
*leading* axes.  Interior size-1 broadcasting is a shape error.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from gimtp.errors import ContractError, ShapeError


def _pad_left(shape, n):
    return (1,) * (n - len(shape)) + tuple(shape)


def broadcast_shape(sa: Sequence[int], sb: Sequence[int]) -> tuple[int, ...]:
    """Resolve the output shape of a leading-axis broadcast, or raise."""
    n = max(len(sa), len(sb))
    pa, pb = _pad_left(sa, n), _pad_left(sb, n)
    s = n
    while s > 0 and pa[s - 1] == pb[s - 1]:
        s -= 1
    for i in range(s):
        if pa[i] != 1 and pb[i] != 1:
            raise ShapeError(
                f"shapes {tuple(sa)} and {tuple(sb)} are not "
                "leading-broadcast compatible"
            )
    return tuple(max(a, b) for a, b in zip(pa, pb))


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """A float64 array plus an optional gradient buffer."""

    def __init__(self, data, requires_grad: bool = False, parents=(), vjp=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents = parents
        self._vjp = vjp

    # -- construction -----------------------------------------------------

    @staticmethod
    def lift(value) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(()))

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def _node(self, data, parents, vjp) -> "Tensor":
        tracked = tuple(p for p in parents if p.requires_grad)
        if tracked:
            return Tensor(data, requires_grad=True, parents=tracked, vjp=vjp)
        return Tensor(data)

    # -- elementwise arithmetic -------------------------------------------

    def __add__(self, other):
        other = Tensor.lift(other)
        broadcast_shape(self.shape, other.shape)
        out = self._node(self.data + other.data, (self, other), None)

        def vjp():
            if self.requires_grad:
                self.grad += _unbroadcast(out.grad, self.shape)
            if other.requires_grad:
                other.grad += _unbroadcast(out.grad, other.shape)

        out._vjp = vjp
        return out

    __radd__ = __add__

    def __mul__(self, other):
        other = Tensor.lift(other)
        broadcast_shape(self.shape, other.shape)
        out = self._node(self.data * other.data, (self, other), None)

        def vjp():
            if self.requires_grad:
                self.grad += _unbroadcast(out.grad * other.data, self.shape)
            if other.requires_grad:
                other.grad += _unbroadcast(out.grad * self.data, other.shape)

        out._vjp = vjp
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-Tensor.lift(other))

    def __rsub__(self, other):
        return Tensor.lift(other) + (-self)

    def __truediv__(self, other):
        other = Tensor.lift(other)
        broadcast_shape(self.shape, other.shape)
        out = self._node(self.data / other.data, (self, other), None)

        def vjp():
            if self.requires_grad:
                self.grad += _unbroadcast(out.grad / other.data, self.shape)
            if other.requires_grad:
                other.grad += _unbroadcast(
                    -out.grad * self.data / (other.data * other.data), other.shape
                )

        out._vjp = vjp
        return out

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise ContractError("only scalar exponents are supported")
        out = self._node(self.data**exponent, (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * exponent * self.data ** (exponent - 1)

        out._vjp = vjp
        return out

    # -- nonlinearities ----------------------------------------------------

    def exp(self):
        out = self._node(np.exp(self.data), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * out.data

        out._vjp = vjp
        return out

    def log(self):
        out = self._node(np.log(self.data), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad / self.data

        out._vjp = vjp
        return out

    def tanh(self):
        out = self._node(np.tanh(self.data), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * (1.0 - out.data * out.data)

        out._vjp = vjp
        return out

    def sigmoid(self):
        x = self.data
        pos = x >= 0
        val = np.empty_like(x)
        val[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        val[~pos] = ex / (1.0 + ex)
        out = self._node(val, (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * out.data * (1.0 - out.data)

        out._vjp = vjp
        return out

    def relu(self):
        out = self._node(np.maximum(self.data, 0.0), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * (self.data > 0.0)

        out._vjp = vjp
        return out

    def clamp_min(self, floor: float):
        out = self._node(np.maximum(self.data, floor), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad * (self.data > floor)

        out._vjp = vjp
        return out

    def softmax(self, axis: int):
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        e = np.exp(shifted)
        val = e / e.sum(axis=axis, keepdims=True)
        out = self._node(val, (self,), None)

        def vjp():
            if self.requires_grad:
                g = out.grad
                dot = (g * out.data).sum(axis=axis, keepdims=True)
                self.grad += (g - dot) * out.data

        out._vjp = vjp
        return out

    # -- linear algebra -----------------------------------------------------

    def __matmul__(self, other):
        other = Tensor.lift(other)
        a, b = self.data, other.data
        if a.ndim < 2 or b.ndim < 2:
            raise ShapeError(
                f"matmul requires 2+ dimensional operands, got {a.shape} @ {b.shape}"
            )
        if a.shape[-1] != b.shape[-2]:
            raise ShapeError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
        broadcast_shape(a.shape[:-2], b.shape[:-2])
        out = self._node(a @ b, (self, other), None)

        def vjp():
            g = out.grad
            if self.requires_grad:
                self.grad += _unbroadcast(g @ np.swapaxes(b, -1, -2), self.shape)
            if other.requires_grad:
                other.grad += _unbroadcast(np.swapaxes(a, -1, -2) @ g, other.shape)

        out._vjp = vjp
        return out

    # -- reductions ----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        out = self._node(self.data.sum(axis=axis, keepdims=keepdims), (self,), None)

        def vjp():
            if self.requires_grad:
                g = out.grad
                if axis is not None and not keepdims:
                    g = np.expand_dims(g, axis)
                self.grad += np.broadcast_to(g, self.shape)

        out._vjp = vjp
        return out

    def mean(self, axis=None, keepdims: bool = False):
        if axis is None:
            count = self.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # -- shape manipulation ----------------------------------------------------

    def reshape(self, shape):
        out = self._node(self.data.reshape(shape), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad.reshape(self.shape)

        out._vjp = vjp
        return out

    def transpose(self, axes: Sequence[int]):
        axes = tuple(axes)
        inverse = tuple(np.argsort(axes))
        out = self._node(self.data.transpose(axes), (self,), None)

        def vjp():
            if self.requires_grad:
                self.grad += out.grad.transpose(inverse)

        out._vjp = vjp
        return out

    def __getitem__(self, idx):
        out = self._node(self.data[idx], (self,), None)

        def vjp():
            if self.requires_grad:
                np.add.at(self.grad, idx, out.grad)

        out._vjp = vjp
        return out

    # -- autodiff ---------------------------------------------------------------

    def backward(self):
        """Populate ``grad`` on every reachable tensor with d(self)/d(tensor).

        ``self`` must be scalar.  Gradient buffers of the reachable graph are
        zeroed first, so repeated calls never accumulate across passes.
        """
        if self.data.size != 1:
            raise ContractError(
                f"backward requires a scalar loss, got shape {self.shape}"
            )
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        for node in order:
            node.grad = np.zeros_like(node.data)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._vjp is not None:
                node._vjp()


def concat(tensors: Iterable[Tensor], axis: int) -> Tensor:
    """Concatenate tensors along an existing axis."""
    parts = [Tensor.lift(t) for t in tensors]
    data = np.concatenate([p.data for p in parts], axis=axis)
    tracked = tuple(p for p in parts if p.requires_grad)
    if not tracked:
        return Tensor(data)
    out = Tensor(data, requires_grad=True, parents=tracked)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def vjp():
        pieces = np.split(out.grad, offsets[1:-1], axis=axis)
        for part, piece in zip(parts, pieces):
            if part.requires_grad:
                part.grad += piece

    out._vjp = vjp
    return out
