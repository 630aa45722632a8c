"""Sliding-window assembly of vehicle-group tensors.

A window covers T history steps and F future steps of one target vehicle.
All coordinates are re-expressed relative to the target's position at the
last history step (the window origin); slot membership is recomputed at
every timestep, so the same slot may hold different vehicles over time.

Feature channels (C = 5): relative pos_lon, relative pos_lat, vel_lon,
vel_lat, occupancy flag.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from gimtp.data.groups import GroupConfig, N_SLOTS, build_group
from gimtp.data.labels import IntentionMatrix, LabelThresholds, label_window
from gimtp.data.tracks import FrameIndex, Track
from gimtp.errors import ContractError

N_FEATURES = 5


@dataclass
class WindowConfig:
    t_hist: int = 30
    f_pred: int = 50
    stride: int = 1
    frame_rate: float = 10.0
    group: GroupConfig = field(default_factory=GroupConfig)
    thresholds: LabelThresholds = field(default_factory=LabelThresholds)


@dataclass
class GroupWindow:
    """One training/evaluation sample."""

    x: np.ndarray  # (T, N, C) features, positions relative to origin
    mask: np.ndarray  # (T, N) occupancy
    y: np.ndarray  # (F, 2) target future positions relative to origin
    hf_target: np.ndarray  # (F, N, C) future group features
    m_true: IntentionMatrix
    frame_rate: float
    origin: np.ndarray  # (2,) absolute target position at the last history step
    target_id: int
    anchor_frame: int  # absolute frame of the last history step
    mass: np.ndarray  # (T, N) per-slot mass, 1.0 where empty
    # target-only raw future state, kept for labeling and round-trips
    fut_lane: np.ndarray = None
    fut_pos: np.ndarray = None  # (F, 2) absolute
    fut_vel: np.ndarray = None  # (F, 2)
    ref_lane: int = 0
    ref_vel_lon: float = 0.0

    @property
    def t_hist(self) -> int:
        return self.x.shape[0]

    @property
    def f_pred(self) -> int:
        return self.y.shape[0]

    @property
    def future_mask(self) -> np.ndarray:
        """(F, N) occupancy of the future feature tensor."""
        return self.hf_target[:, :, 4] > 0.5


def label_intentions(
    window: GroupWindow, thresholds: LabelThresholds | None = None,
    left_sign: int = 1,
) -> IntentionMatrix:
    """Label the window's future steps; depends only on stored future state."""
    return label_window(
        fut_lane=window.fut_lane,
        fut_pos_lat=window.fut_pos[:, 1],
        fut_vel_lat=window.fut_vel[:, 1],
        fut_vel_lon=window.fut_vel[:, 0],
        ref_lane=window.ref_lane,
        ref_pos_lat=window.origin[1],
        ref_vel_lon=window.ref_vel_lon,
        left_sign=left_sign,
        thresholds=thresholds,
    )


def _fill_step(
    tracks, index, target_id, frame, cfg, origin, feats, mask_row, mass_row
):
    slots = build_group(tracks, target_id, frame, cfg.group, index)
    for slot in range(N_SLOTS):
        vid = slots[slot]
        if vid < 0:
            continue
        s = tracks[vid].at(frame)
        feats[slot, 0] = s.pos_lon - origin[0]
        feats[slot, 1] = s.pos_lat - origin[1]
        feats[slot, 2] = s.vel_lon
        feats[slot, 3] = s.vel_lat
        feats[slot, 4] = 1.0
        mask_row[slot] = True
        mass_row[slot] = s.mass


def _build_window(tracks, index, target_id, anchor, cfg: WindowConfig) -> GroupWindow:
    t_hist, f_pred = cfg.t_hist, cfg.f_pred
    track = tracks[target_id]
    at_anchor = track.at(anchor)
    origin = np.array([at_anchor.pos_lon, at_anchor.pos_lat])

    x = np.zeros((t_hist, N_SLOTS, N_FEATURES))
    mask = np.zeros((t_hist, N_SLOTS), dtype=bool)
    mass = np.ones((t_hist, N_SLOTS))
    for i, frame in enumerate(range(anchor - t_hist + 1, anchor + 1)):
        _fill_step(tracks, index, target_id, frame, cfg, origin, x[i], mask[i], mass[i])

    hf = np.zeros((f_pred, N_SLOTS, N_FEATURES))
    fut_mask = np.zeros((f_pred, N_SLOTS), dtype=bool)
    fut_mass = np.ones((f_pred, N_SLOTS))
    fut_lane = np.zeros(f_pred, dtype=np.int64)
    fut_pos = np.zeros((f_pred, 2))
    fut_vel = np.zeros((f_pred, 2))
    for i, frame in enumerate(range(anchor + 1, anchor + f_pred + 1)):
        _fill_step(
            tracks, index, target_id, frame, cfg, origin, hf[i], fut_mask[i], fut_mass[i]
        )
        s = track.at(frame)
        fut_lane[i] = s.lane_id
        fut_pos[i] = (s.pos_lon, s.pos_lat)
        fut_vel[i] = (s.vel_lon, s.vel_lat)

    window = GroupWindow(
        x=x,
        mask=mask,
        y=fut_pos - origin,
        hf_target=hf,
        m_true=None,
        frame_rate=cfg.frame_rate,
        origin=origin,
        target_id=target_id,
        anchor_frame=anchor,
        mass=mass,
        fut_lane=fut_lane,
        fut_pos=fut_pos,
        fut_vel=fut_vel,
        ref_lane=at_anchor.lane_id,
        ref_vel_lon=at_anchor.vel_lon,
    )
    window.m_true = label_intentions(window, cfg.thresholds, cfg.group.left_sign)
    return window


def _worker_count() -> int:
    env = os.environ.get("GIMTP_THREADS")
    if env:
        return max(1, int(env))
    return 1


def make_windows(
    tracks: dict[int, Track],
    cfg: WindowConfig,
    target_ids=None,
    workers: int | None = None,
) -> list[GroupWindow]:
    """Build every valid window over the track collection.

    A (target, anchor) pair is valid when the target is present on every
    frame of the T-history and F-future span.  Output order is canonical:
    sorted by target id, then anchor frame, independent of worker count.
    """
    if cfg.t_hist < 2 or cfg.f_pred < 1:
        raise ContractError("need t_hist >= 2 and f_pred >= 1")
    index = FrameIndex(tracks)
    ids = sorted(target_ids) if target_ids is not None else sorted(tracks)
    tasks = []
    for vid in ids:
        track = tracks[vid]
        frames = track.frames()
        if len(frames) < cfg.t_hist + cfg.f_pred:
            continue
        present = set(frames)
        first = frames[0] + cfg.t_hist - 1
        last = frames[-1] - cfg.f_pred
        for anchor in range(first, last + 1, cfg.stride):
            span = range(anchor - cfg.t_hist + 1, anchor + cfg.f_pred + 1)
            if all(f in present for f in span):
                tasks.append((vid, anchor))

    n_workers = workers if workers is not None else _worker_count()
    if n_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            out = list(
                pool.map(lambda t: _build_window(tracks, index, t[0], t[1], cfg), tasks)
            )
    else:
        out = [_build_window(tracks, index, vid, anchor, cfg) for vid, anchor in tasks]
    return out
