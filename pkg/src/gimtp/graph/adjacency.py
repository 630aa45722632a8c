"""Risk-aware dynamic adjacency over a vehicle-group window.

Three per-timestep components, each in [0, 1], are averaged into the
combined interaction matrix:

* neighborhood — 1 for occupied slot pairs whose grid cells touch;
* distance     — Gaussian decay of pairwise Euclidean distance, scaled by
  the per-timestep standard deviation of occupied pair distances;
* potential risk — tanh-squashed "equivalent force" of a follower closing
  on a leader, evaluated independently per axis and gated to zero when the
  relative velocity along that axis is non-positive.

Rows and columns of unoccupied slots are zero everywhere, as are all
diagonals; the risk component is directed (follower -> leader), the other
two are symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gimtp.data.groups import KING_ADJACENCY
from gimtp.data.tracks import VehicleState
from gimtp.data.windows import GroupWindow

EPS_GAP = 0.1  # m, clamps the zero-gap singularity in the force denominator
FALLBACK_SIGMA_DIST = 1.0  # m, used when the distance spread degenerates


@dataclass
class RiskForce:
    """Pairwise equivalent forces of vehicle i (follower) toward j."""

    f_lon: float
    f_lat: float
    f_res: float
    energy: float  # diagnostic only; never enters the adjacency


@dataclass
class DynamicAdjacency:
    """Combined weights plus the three components, all (T, N, N)."""

    combined: np.ndarray
    neigh: np.ndarray
    dist: np.ndarray
    risk: np.ndarray
    sigma_dist: np.ndarray  # (T,)
    sigma_force: np.ndarray  # (T,)


def _axis_force(m_i, s_i, s_j, d_i, d_j):
    rel = s_i - s_j
    if rel <= 0.0:
        return 0.0, 0.0
    gap = max(abs(d_i - d_j), EPS_GAP)
    force = 0.5 * m_i * s_i * rel / gap
    force = max(force, 0.0)  # a negative follower velocity carries no risk
    return force, force * gap


def risk_force(state_i: VehicleState, state_j: VehicleState) -> RiskForce:
    """Equivalent force exerted by follower ``state_i`` toward ``state_j``."""
    f_lon, e_lon = _axis_force(
        state_i.mass, state_i.vel_lon, state_j.vel_lon, state_i.pos_lon, state_j.pos_lon
    )
    f_lat, e_lat = _axis_force(
        state_i.mass, state_i.vel_lat, state_j.vel_lat, state_i.pos_lat, state_j.pos_lat
    )
    return RiskForce(
        f_lon=f_lon,
        f_lat=f_lat,
        f_res=float(np.hypot(f_lon, f_lat)),
        energy=e_lon + e_lat,
    )


def _pair_mask(mask: np.ndarray) -> np.ndarray:
    """(T, N, N) occupied-pair indicator with a zero diagonal."""
    m = mask.astype(bool)
    pairs = m[:, :, None] & m[:, None, :]
    n = mask.shape[1]
    pairs[:, np.arange(n), np.arange(n)] = False
    return pairs


def neighborhood_adjacency(mask: np.ndarray) -> np.ndarray:
    """1 where both slots are occupied and grid-adjacent (king moves)."""
    pairs = _pair_mask(mask)
    return (pairs & KING_ADJACENCY[None, :, :]).astype(np.float64)


def distance_adjacency(positions: np.ndarray, mask: np.ndarray):
    """Gaussian distance decay; returns the matrix and per-step sigma."""
    t_len, n = mask.shape
    pairs = _pair_mask(mask)
    diff = positions[:, :, None, :] - positions[:, None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))

    sigma = np.full(t_len, FALLBACK_SIGMA_DIST)
    iu = np.triu_indices(n, k=1)
    for t in range(t_len):
        vals = dist[t][iu][pairs[t][iu]]
        if len(vals) >= 2:
            s = float(np.std(vals))
            if s > 0.0:
                sigma[t] = s
    out = np.exp(-((dist / sigma[:, None, None]) ** 2))
    out[~pairs] = 0.0
    return out, sigma


def pairwise_forces(positions, velocities, mass, mask):
    """Vectorized resultant forces over every ordered occupied pair.

    Inputs are (T, N, 2) positions/velocities, (T, N) mass and occupancy;
    the result is (T, N, N) with rows indexing the follower.
    """
    pairs = _pair_mask(mask)
    f_axes = []
    for axis in (0, 1):
        s_i = velocities[:, :, None, axis]
        s_j = velocities[:, None, :, axis]
        rel = s_i - s_j
        gap = np.abs(positions[:, :, None, axis] - positions[:, None, :, axis])
        gap = np.maximum(gap, EPS_GAP)
        f = 0.5 * mass[:, :, None] * s_i * rel / gap
        f = np.where(rel > 0.0, np.maximum(f, 0.0), 0.0)
        f_axes.append(f)
    f_res = np.hypot(f_axes[0], f_axes[1])
    f_res[~pairs] = 0.0
    return f_res


def risk_adjacency(forces: np.ndarray, mask: np.ndarray):
    """tanh(F / sigma_F) per ordered pair; zero when the spread degenerates."""
    t_len = mask.shape[0]
    pairs = _pair_mask(mask)
    out = np.zeros_like(forces)
    sigma = np.zeros(t_len)
    for t in range(t_len):
        vals = forces[t][pairs[t]]
        if len(vals) < 2:
            continue
        s = float(np.std(vals))
        if s <= 0.0:
            continue
        sigma[t] = s
        out[t] = np.tanh(forces[t] / s)
    out[~pairs] = 0.0
    return out, sigma


def combine(neigh: np.ndarray, dist: np.ndarray, risk: np.ndarray) -> np.ndarray:
    """Average of the three unit-interval components, again in [0, 1]."""
    return (neigh + dist + risk) / 3.0


def dynamic_adjacency(positions, velocities, mass, mask) -> DynamicAdjacency:
    """Full adjacency pipeline over raw (T, N, ...) arrays."""
    neigh = neighborhood_adjacency(mask)
    dist, sigma_dist = distance_adjacency(positions, mask)
    forces = pairwise_forces(positions, velocities, mass, mask)
    risk, sigma_force = risk_adjacency(forces, mask)
    return DynamicAdjacency(
        combined=combine(neigh, dist, risk),
        neigh=neigh,
        dist=dist,
        risk=risk,
        sigma_dist=sigma_dist,
        sigma_force=sigma_force,
    )


def build_adjacency(window: GroupWindow) -> DynamicAdjacency:
    """Adjacency of a group window's history span."""
    return dynamic_adjacency(
        positions=window.x[:, :, 0:2],
        velocities=window.x[:, :, 2:4],
        mass=window.mass,
        mask=window.mask,
    )
