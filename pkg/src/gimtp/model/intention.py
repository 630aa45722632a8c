"""Per-future-step lateral and longitudinal intention probabilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gimtp.nn.layers import Dense, TimeDense
from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor


@dataclass
class IntentionDistribution:
    """Column-stochastic probabilities, shape (3, F) per head."""

    p_lat: np.ndarray
    p_lon: np.ndarray


class IntentionHead:
    """Aggregate node embeddings per step, map the horizon, emit class logits.

    The node aggregation (flatten nodes x features, dense, ReLU) yields the
    per-timestep vectors that the decoder's feature fusion also consumes.
    """

    def __init__(self, store: ParameterStore, cfg):
        horizon = cfg.horizon
        self.mlp_v = Dense(
            store, "intent.mlp_v", cfg.n_slots * cfg.dgcn_width, cfg.agg_width
        )
        self.mlp_o = TimeDense(store, "intent.mlp_o", horizon, cfg.f_pred, bias=True)
        self.lat_head = Dense(store, "intent.lat", cfg.agg_width, 3)
        self.lon_head = Dense(store, "intent.lon", cfg.agg_width, 3)

    def aggregate(self, h_cat: Tensor) -> Tensor:
        """(B, H, N, d) -> (B, H, agg): shared per-timestep vectors."""
        b, horizon, n, d = h_cat.shape
        flat = h_cat.reshape((b, horizon, n * d))
        return self.mlp_v(flat).relu()

    def __call__(self, h_agg: Tensor) -> tuple[Tensor, Tensor]:
        """Returns (p_lat, p_lon), each (B, F, 3), softmax over classes."""
        h_m = self.mlp_o(h_agg, axis=1)  # (B, F, agg)
        p_lat = self.lat_head(h_m).softmax(axis=-1)
        p_lon = self.lon_head(h_m).softmax(axis=-1)
        return p_lat, p_lon


def to_distribution(p_lat: np.ndarray, p_lon: np.ndarray) -> IntentionDistribution:
    """Repack one window's (F, 3) probabilities into (3, F) matrices."""
    return IntentionDistribution(p_lat=p_lat.T.copy(), p_lon=p_lon.T.copy())
