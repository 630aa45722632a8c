"""Per-future-step maneuver labels for the target vehicle.

Lateral classes: lane keep (LK), left lane change (LLC), right lane change
(RLC).  Longitudinal classes: constant speed (CS), acceleration (ACC),
deceleration (DEC).  The thresholds are deliberately isolated in
``LabelThresholds`` — they are tunable conventions, not physics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAT_CLASSES = ("LK", "LLC", "RLC")
LON_CLASSES = ("CS", "ACC", "DEC")
LK, LLC, RLC = 0, 1, 2
CS, ACC, DEC = 0, 1, 2


@dataclass
class LabelThresholds:
    v_lat_min: float = 0.2  # m/s of lateral speed that signals a lane change
    lat_disp_min: float = 0.5  # m of lateral displacement backing the signal
    delta_v: float = 0.5  # m/s of longitudinal speed change for ACC/DEC


@dataclass
class IntentionMatrix:
    """One-hot lateral and longitudinal labels, shape (3, F) each."""

    lat: np.ndarray
    lon: np.ndarray

    def stacked(self) -> np.ndarray:
        """(6, F) float matrix: lateral rows on top of longitudinal rows."""
        return np.concatenate([self.lat, self.lon], axis=0).astype(np.float64)

    def validate(self):
        for block in (self.lat, self.lon):
            assert block.shape[0] == 3
            assert set(np.unique(block)) <= {0, 1}
            assert (block.sum(axis=0) == 1).all()


def label_window(
    fut_lane: np.ndarray,
    fut_pos_lat: np.ndarray,
    fut_vel_lat: np.ndarray,
    fut_vel_lon: np.ndarray,
    ref_lane: int,
    ref_pos_lat: float,
    ref_vel_lon: float,
    left_sign: int = 1,
    thresholds: LabelThresholds | None = None,
) -> IntentionMatrix:
    """Label every future step against the state at the prediction origin."""
    th = thresholds or LabelThresholds()
    f = len(fut_lane)
    lat = np.zeros((3, f), dtype=np.int64)
    lon = np.zeros((3, f), dtype=np.int64)
    for t in range(f):
        d_lane = (fut_lane[t] - ref_lane) * left_sign
        disp_left = (fut_pos_lat[t] - ref_pos_lat) * left_sign
        v_left = fut_vel_lat[t] * left_sign
        if d_lane > 0:
            cls = LLC
        elif d_lane < 0:
            cls = RLC
        elif v_left > th.v_lat_min and disp_left >= th.lat_disp_min:
            cls = LLC
        elif -v_left > th.v_lat_min and -disp_left >= th.lat_disp_min:
            cls = RLC
        else:
            cls = LK
        lat[cls, t] = 1

        dv = fut_vel_lon[t] - ref_vel_lon
        if dv > th.delta_v:
            lon[ACC, t] = 1
        elif dv < -th.delta_v:
            lon[DEC, t] = 1
        else:
            lon[CS, t] = 1
    return IntentionMatrix(lat, lon)
