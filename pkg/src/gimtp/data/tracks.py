"""Trajectory CSV ingestion and per-vehicle track assembly.

Input files are comma-delimited with a header row.  Required columns:
``frame, vehicle_id, pos_lon, pos_lat, lane_id``; optional columns:
``vel_lon, vel_lat, mass, class``.  Positions are meters, velocities m/s.
Column names can be remapped through the dataset config.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gimtp.errors import DataError, SchemaError

REQUIRED_COLUMNS = ("frame", "vehicle_id", "pos_lon", "pos_lat", "lane_id")
OPTIONAL_COLUMNS = ("vel_lon", "vel_lat", "mass", "class")


@dataclass
class VehicleState:
    """One vehicle at one frame."""

    vehicle_id: int
    frame: int
    pos_lon: float
    pos_lat: float
    vel_lon: float
    vel_lat: float
    lane_id: int
    mass: float = 1.0


@dataclass
class Track:
    """Frame-ordered states of a single vehicle."""

    vehicle_id: int
    states: list[VehicleState] = field(default_factory=list)

    def __post_init__(self):
        self._by_frame = {s.frame: s for s in self.states}

    def append(self, state: VehicleState):
        self.states.append(state)
        self._by_frame[state.frame] = state

    def at(self, frame: int) -> VehicleState | None:
        return self._by_frame.get(frame)

    def frames(self) -> list[int]:
        return [s.frame for s in self.states]

    def __len__(self):
        return len(self.states)


class FrameIndex:
    """frame -> list of states, for neighbor lookups."""

    def __init__(self, tracks: dict[int, Track]):
        self._frames: dict[int, list[VehicleState]] = {}
        for track in tracks.values():
            for s in track.states:
                self._frames.setdefault(s.frame, []).append(s)

    def at(self, frame: int) -> list[VehicleState]:
        return self._frames.get(frame, [])


def _derive_velocities(track: Track, dt: float):
    """Central differences in the interior, one-sided at the ends."""
    states = track.states
    n = len(states)
    if n == 1:
        states[0].vel_lon = 0.0
        states[0].vel_lat = 0.0
        return
    for i, s in enumerate(states):
        lo = states[max(i - 1, 0)]
        hi = states[min(i + 1, n - 1)]
        span = (hi.frame - lo.frame) * dt
        s.vel_lon = (hi.pos_lon - lo.pos_lon) / span
        s.vel_lat = (hi.pos_lat - lo.pos_lat) / span


def _resample(states: list[VehicleState], src_hz: float, dst_hz: float):
    """Pick the source frame nearest each destination tick and re-index."""
    duration = (len(states) - 1) / src_hz
    n_out = int(np.floor(duration * dst_hz)) + 1
    picked = []
    for k in range(n_out):
        idx = int(round(k * src_hz / dst_hz))
        picked.append(states[min(idx, len(states) - 1)])
    out = []
    for k, s in enumerate(picked):
        out.append(
            VehicleState(
                s.vehicle_id, k, s.pos_lon, s.pos_lat, s.vel_lon, s.vel_lat,
                s.lane_id, s.mass,
            )
        )
    return out


def load_csv(
    path,
    columns: dict[str, str] | None = None,
    frame_rate: float = 10.0,
    resample_to_hz: float | None = None,
    mass_by_class: dict[str, float] | None = None,
    default_mass: float = 1.0,
) -> dict[int, Track]:
    """Read a trajectory CSV into per-vehicle tracks.

    ``columns`` remaps canonical names to file header names.  Velocities are
    derived by central differences when the file lacks them.  When
    ``resample_to_hz`` is given and differs from ``frame_rate``, tracks are
    decimated to the target rate before velocity derivation.
    """
    path = Path(path)
    remap = {name: name for name in REQUIRED_COLUMNS + OPTIONAL_COLUMNS}
    if columns:
        remap.update(columns)

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in REQUIRED_COLUMNS:
            if remap[name] not in header:
                raise SchemaError(
                    f"{path.name}: missing required column {remap[name]!r}"
                )
        has_vel = remap["vel_lon"] in header and remap["vel_lat"] in header
        has_mass = remap["mass"] in header
        has_class = remap["class"] in header

        tracks: dict[int, Track] = {}
        for row in reader:
            vid = int(float(row[remap["vehicle_id"]]))
            frame = int(float(row[remap["frame"]]))
            mass = default_mass
            if has_mass and row[remap["mass"]] != "":
                mass = float(row[remap["mass"]])
            elif has_class and mass_by_class:
                mass = mass_by_class.get(row[remap["class"]], default_mass)
            state = VehicleState(
                vehicle_id=vid,
                frame=frame,
                pos_lon=float(row[remap["pos_lon"]]),
                pos_lat=float(row[remap["pos_lat"]]),
                vel_lon=float(row[remap["vel_lon"]]) if has_vel else 0.0,
                vel_lat=float(row[remap["vel_lat"]]) if has_vel else 0.0,
                lane_id=int(float(row[remap["lane_id"]])),
                mass=mass,
            )
            track = tracks.get(vid)
            if track is None:
                track = Track(vid)
                tracks[vid] = track
            else:
                last = track.states[-1].frame
                if frame == last:
                    raise DataError(
                        f"duplicate (vehicle_id, frame) pair: ({vid}, {frame})"
                    )
                if frame < last:
                    raise DataError(
                        f"non-monotone frames for vehicle {vid}: "
                        f"{frame} after {last}"
                    )
            track.append(state)

    effective_hz = frame_rate
    if resample_to_hz and resample_to_hz != frame_rate:
        for vid, track in tracks.items():
            tracks[vid] = Track(vid, _resample(track.states, frame_rate, resample_to_hz))
        effective_hz = resample_to_hz

    if not has_vel:
        for track in tracks.values():
            _derive_velocities(track, 1.0 / effective_hz)
    return tracks
