"""Vehicle-group slot grid: the target plus up to eight neighbors.

Slots form a 3x3 grid over (longitudinal band, relative lane).  Rows are
preceding / parallel / following, columns are left / same / right relative
to the target.  Slot 0 is the target at the grid center; the remaining
cells are numbered row-major:

    1 2 3      (preceding:  left, same, right)
    4 0 5      (parallel:   left, target, right)
    6 7 8      (following:  left, same, right)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gimtp.data.tracks import FrameIndex, Track, VehicleState
from gimtp.errors import TargetLookupError

N_SLOTS = 9

# slot index -> (row, col) in the 3x3 grid
SLOT_CELLS = {
    0: (1, 1),
    1: (0, 0),
    2: (0, 1),
    3: (0, 2),
    4: (1, 0),
    5: (1, 2),
    6: (2, 0),
    7: (2, 1),
    8: (2, 2),
}

_CELL_TO_SLOT = {cell: slot for slot, cell in SLOT_CELLS.items()}


def king_adjacency() -> np.ndarray:
    """9x9 boolean matrix: slots whose grid cells touch (king moves)."""
    adj = np.zeros((N_SLOTS, N_SLOTS), dtype=bool)
    for i, (ri, ci) in SLOT_CELLS.items():
        for j, (rj, cj) in SLOT_CELLS.items():
            if i != j and abs(ri - rj) <= 1 and abs(ci - cj) <= 1:
                adj[i, j] = True
    return adj


KING_ADJACENCY = king_adjacency()


@dataclass
class GroupConfig:
    """Slot-assignment knobs."""

    search_range: float = 90.0  # meters of longitudinal window, each direction
    parallel_band: float = 5.0  # |dlon| below this counts as side-by-side
    left_sign: int = 1  # +1: left neighbors have larger lane_id and pos_lat


def slot_for(state: VehicleState, target: VehicleState, cfg: GroupConfig) -> int | None:
    """Grid slot a candidate occupies relative to the target, or None."""
    d_lane = (state.lane_id - target.lane_id) * cfg.left_sign
    if d_lane > 1 or d_lane < -1:
        return None
    col = 1 - d_lane  # left lane -> column 0
    d_lon = state.pos_lon - target.pos_lon
    if abs(d_lon) > cfg.search_range:
        return None
    if abs(d_lon) <= cfg.parallel_band:
        row = 1
        if col == 1:  # same lane within the band: fall back on the sign
            row = 0 if d_lon >= 0 else 2
    elif d_lon > 0:
        row = 0
    else:
        row = 2
    if (row, col) == (1, 1):
        return None  # target's own cell
    return _CELL_TO_SLOT[(row, col)]


def build_group(
    tracks: dict[int, Track],
    target_id: int,
    frame: int,
    cfg: GroupConfig,
    frame_index: FrameIndex | None = None,
) -> np.ndarray:
    """Assign vehicles to the 9 slots at one frame.

    Returns an int array of vehicle ids per slot (-1 for empty).  Each
    non-target slot takes the qualifying vehicle nearest in longitudinal
    distance.
    """
    target_track = tracks.get(target_id)
    target = target_track.at(frame) if target_track else None
    if target is None:
        raise TargetLookupError(
            f"target vehicle {target_id} is not present at frame {frame}"
        )
    index = frame_index or FrameIndex(tracks)
    slots = np.full(N_SLOTS, -1, dtype=np.int64)
    slots[0] = target_id
    best = np.full(N_SLOTS, np.inf)
    for state in index.at(frame):
        if state.vehicle_id == target_id:
            continue
        slot = slot_for(state, target, cfg)
        if slot is None:
            continue
        score = abs(state.pos_lon - target.pos_lon)
        if score < best[slot]:
            best[slot] = score
            slots[slot] = state.vehicle_id
    return slots
