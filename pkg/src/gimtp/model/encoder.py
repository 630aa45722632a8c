"""Interaction encoder: historical and future-guided graph embeddings.

The historical stack encodes the T observed steps under their own
per-timestep transition matrices.  The future-guided branch first maps the
T input steps to F steps with a learned time-axis linear map (bias-free so
empty slots stay exactly zero), then runs its own stack under the last
observed step's transitions — no future adjacency is observable at
inference time.  A linear readout of the future embedding back to feature
space is what the future-guidance loss term supervises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gimtp.nn.layers import Dense, TimeDense
from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor, concat


@dataclass
class EncoderOutput:
    h_hist: Tensor  # (B, T, N, d)
    h_fut: Tensor | None  # (B, F, N, d)
    h_cat: Tensor  # (B, T+F, N, d) — or (B, T, N, d) without the future branch
    h_f_features: Tensor | None  # (B, F, N, C) readout for the guidance loss


class InteractionEncoder:
    def __init__(self, store: ParameterStore, cfg, stack_factory):
        self.cfg = cfg
        d = cfg.dgcn_width
        self.hist_stack = stack_factory("enc_hist", cfg.features, (d, d, d))
        if cfg.no_fg:
            self.time_map = None
            self.fut_stack = None
            self.readout = None
        else:
            self.time_map = TimeDense(
                store, "enc_fut.time_map", cfg.t_hist, cfg.f_pred, bias=False
            )
            self.fut_stack = stack_factory("enc_fut", cfg.features, (d, d, d))
            self.readout = Dense(store, "enc_fut.readout", d, cfg.features)

    def __call__(self, x: Tensor, hist_supports, fut_supports) -> EncoderOutput:
        h_hist = self.hist_stack(x, hist_supports)
        if self.fut_stack is None:
            return EncoderOutput(h_hist, None, h_hist, None)
        # (B, T, N, C) -> (B, F, N, C): mix the time axis per node and feature
        x_fut = self.time_map(x, axis=1)
        h_fut = self.fut_stack(x_fut, fut_supports)
        h_cat = concat([h_hist, h_fut], axis=1)
        return EncoderOutput(h_hist, h_fut, h_cat, self.readout(h_fut))


def future_similarity(h_fut: np.ndarray) -> np.ndarray:
    """Row-normalized shifted-cosine similarity of future node embeddings.

    Input (F, N, d); output (F, N, N) with zero diagonals and rows summing
    to 1 (rows of all-zero embeddings fall back to a self-loop).
    """
    f_pred, n, _ = h_fut.shape
    norms = np.linalg.norm(h_fut, axis=-1)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = h_fut / safe[:, :, None]
    cos = unit @ np.swapaxes(unit, -1, -2)
    sim = 0.5 * (1.0 + cos)
    sim[:, np.arange(n), np.arange(n)] = 0.0
    sums = sim.sum(axis=-1, keepdims=True)
    out = np.divide(sim, sums, out=np.zeros_like(sim), where=sums > 0.0)
    zero_rows = (sums[..., 0] == 0.0)
    eye = np.eye(n)
    for t in range(f_pred):
        out[t][zero_rows[t]] = eye[zero_rows[t]]
    return out
