"""Diffusion graph convolution layers over per-timestep transition matrices.

A diffusion layer propagates node features along the row-normalized
adjacency (forward transitions, downstream influence) and along the
row-normalized transpose (backward transitions, upstream influence),
weighting each Chebyshev order and direction with its own parameter
matrix.  The plain-GCN layer is the ablation replacement: symmetric
normalization of A + I with a single parameter matrix.
"""

from __future__ import annotations

import numpy as np

from gimtp.errors import ConfigError, ShapeError
from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor


def _row_normalize(adj: np.ndarray) -> np.ndarray:
    """Rows rescaled to sum 1; all-zero rows become self-loop rows."""
    n = adj.shape[-1]
    sums = adj.sum(axis=-1, keepdims=True)
    safe = np.where(sums > 0.0, sums, 1.0)
    out = adj / safe
    eye = np.eye(n)
    zero_rows = (sums == 0.0)  # (..., N, 1)
    return np.where(zero_rows, eye, out)


def transition_pair(adj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward and backward transition matrices of (..., N, N) adjacency."""
    fwd = _row_normalize(adj)
    bwd = _row_normalize(np.swapaxes(adj, -1, -2))
    return fwd, bwd


def chebyshev(k: int, x: np.ndarray) -> np.ndarray:
    """k-th Chebyshev polynomial of a square matrix (T0 = I, T1 = X)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != x.shape[-2]:
        raise ShapeError(f"chebyshev needs square matrices, got {x.shape}")
    n = x.shape[-1]
    eye = np.broadcast_to(np.eye(n), x.shape).copy()
    if k == 0:
        return eye
    prev, cur = eye, x
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * (x @ cur) - prev
    return cur


def chebyshev_stack(x: np.ndarray, order: int) -> list[np.ndarray]:
    """[T_1(x), ..., T_order(x)] via the recurrence."""
    n = x.shape[-1]
    eye = np.broadcast_to(np.eye(n), x.shape)
    out = [x]
    prev, cur = eye, x
    for _ in range(order - 1):
        prev, cur = cur, 2.0 * (x @ cur) - prev
        out.append(cur)
    return out


def gcn_support(adj: np.ndarray) -> np.ndarray:
    """Symmetric normalization D^-1/2 (A + I) D^-1/2."""
    n = adj.shape[-1]
    a_hat = adj + np.eye(n)
    deg = a_hat.sum(axis=-1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    return a_hat * inv_sqrt[..., :, None] * inv_sqrt[..., None, :]


class DiffusionSupports:
    """Chebyshev stacks of the forward/backward transitions, as constants."""

    def __init__(self, adj: np.ndarray, order: int):
        fwd, bwd = transition_pair(adj)
        self.fwd = [Tensor(t) for t in chebyshev_stack(fwd, order)]
        self.bwd = [Tensor(t) for t in chebyshev_stack(bwd, order)]
        self.order = order


class DiffusionLayer:
    """out = sum_k T_k(fwd) @ h @ theta_f_k + T_k(bwd) @ h @ theta_b_k."""

    def __init__(self, store: ParameterStore, name: str, d_in: int, d_out: int, order: int):
        self.order = order
        self.theta_f = [
            store.glorot(f"{name}.theta_f{k}", (d_in, d_out)) for k in range(1, order + 1)
        ]
        self.theta_b = [
            store.glorot(f"{name}.theta_b{k}", (d_in, d_out)) for k in range(1, order + 1)
        ]

    def __call__(self, h: Tensor, supports: DiffusionSupports) -> Tensor:
        if supports.order != self.order:
            raise ShapeError(
                f"supports carry order {supports.order}, layer expects {self.order}"
            )
        out = None
        for k in range(self.order):
            term = (supports.fwd[k] @ h) @ self.theta_f[k]
            term = term + (supports.bwd[k] @ h) @ self.theta_b[k]
            out = term if out is None else out + term
        return out


class GcnSupports:
    def __init__(self, adj: np.ndarray):
        self.sym = Tensor(gcn_support(adj))


class GcnLayer:
    """out = sym_norm(A + I) @ h @ theta."""

    def __init__(self, store: ParameterStore, name: str, d_in: int, d_out: int):
        self.theta = store.glorot(f"{name}.theta", (d_in, d_out))

    def __call__(self, h: Tensor, supports: GcnSupports) -> Tensor:
        return (supports.sym @ h) @ self.theta


class EncoderStack:
    """Three graph-conv layers; the middle one is a ReLU residual block."""

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        d_in: int,
        widths: tuple[int, int, int],
        order: int,
        use_diffusion: bool = True,
    ):
        w1, w2, w3 = widths
        if w1 != w2:
            raise ConfigError(
                f"{name}: residual needs layer2 width {w2} == layer1 width {w1}"
            )
        make = (
            (lambda n, a, b: DiffusionLayer(store, n, a, b, order))
            if use_diffusion
            else (lambda n, a, b: GcnLayer(store, n, a, b))
        )
        self.l1 = make(f"{name}.l1", d_in, w1)
        self.l2 = make(f"{name}.l2", w1, w2)
        self.l3 = make(f"{name}.l3", w2, w3)

    def __call__(self, x: Tensor, supports) -> Tensor:
        h1 = self.l1(x, supports)
        h2 = self.l2(h1, supports).relu() + h1
        return self.l3(h2, supports)
