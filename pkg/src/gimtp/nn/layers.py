"""Small learnable building blocks on top of the tensor engine."""

from __future__ import annotations

from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor, concat


class Dense:
    """Affine map over the last axis: y = x @ w + b."""

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        d_in: int,
        d_out: int,
        bias: bool = True,
    ):
        self.w = store.glorot(f"{name}.w", (d_in, d_out))
        self.b = store.zeros(f"{name}.b", (d_out,)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        y = x @ self.w
        if self.b is not None:
            y = y + self.b
        return y


class TimeDense:
    """Linear map along the second-to-last-but-time axis of (..., T, D) inputs.

    Mixes the T axis into T_out while leaving every other axis untouched.
    Bias, when present, is per output step.
    """

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        t_in: int,
        t_out: int,
        bias: bool = False,
    ):
        self.w = store.glorot(f"{name}.w", (t_in, t_out))
        self.b = store.zeros(f"{name}.b", (t_out,)) if bias else None

    def __call__(self, x: Tensor, axis: int) -> Tensor:
        nd = x.ndim
        axis = axis % nd
        perm = [i for i in range(nd) if i != axis] + [axis]
        y = x.transpose(perm) @ self.w
        if self.b is not None:
            y = y + self.b
        back = list(range(nd - 1))
        back.insert(axis, nd - 1)
        return y.transpose(back)


class GruCell:
    """Gated recurrent cell with update/reset gates."""

    def __init__(self, store: ParameterStore, name: str, d_in: int, d_hidden: int):
        g = store.glorot
        self.wz = g(f"{name}.wz", (d_in, d_hidden))
        self.uz = g(f"{name}.uz", (d_hidden, d_hidden))
        self.bz = store.zeros(f"{name}.bz", (d_hidden,))
        self.wr = g(f"{name}.wr", (d_in, d_hidden))
        self.ur = g(f"{name}.ur", (d_hidden, d_hidden))
        self.br = store.zeros(f"{name}.br", (d_hidden,))
        self.wn = g(f"{name}.wn", (d_in, d_hidden))
        self.un = g(f"{name}.un", (d_hidden, d_hidden))
        self.bn = store.zeros(f"{name}.bn", (d_hidden,))

    def __call__(self, x: Tensor, h: Tensor) -> Tensor:
        z = (x @ self.wz + h @ self.uz + self.bz).sigmoid()
        r = (x @ self.wr + h @ self.ur + self.br).sigmoid()
        n = (x @ self.wn + (r * h) @ self.un + self.bn).tanh()
        return (1.0 - z) * n + z * h


def run_gru(cell: GruCell, inputs: Tensor, h0: Tensor) -> Tensor:
    """Unroll a GRU over axis 1 of (B, T, D) inputs; returns (B, T, H)."""
    b, t_len, _ = inputs.shape
    h = h0
    outs = []
    for t in range(t_len):
        h = cell(inputs[:, t, :], h)
        outs.append(h.reshape((b, 1, -1)))
    return concat(outs, axis=1)
