"""Synthetic multi-lane highway scenarios with scripted maneuvers.

Tracks are kinematically consistent: longitudinal position integrates the
speed profile frame by frame, and lateral motion during a lane change
follows a smooth half-cosine ramp between lane centers with its analytic
velocity.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gimtp.data.tracks import Track, VehicleState
from gimtp.errors import ConfigError

VALID_MANEUVERS = ("lane_change", "speed_ramp")


@dataclass
class Maneuver:
    kind: str
    start_s: float
    duration_s: float
    direction: str = "left"  # lane_change only
    delta: float = 0.0  # speed_ramp only, m/s

    def __post_init__(self):
        if self.kind not in VALID_MANEUVERS:
            raise ConfigError(f"unknown maneuver kind: {self.kind!r}")
        if self.duration_s <= 0:
            raise ConfigError("maneuver duration must be positive")


@dataclass
class VehicleSpec:
    vehicle_id: int
    lane: int
    pos_lon: float
    speed: float
    maneuvers: list[Maneuver] = field(default_factory=list)
    mass: float = 1.0


@dataclass
class ScenarioSpec:
    lanes: int
    duration_s: float
    frame_rate: float = 10.0
    lane_width: float = 3.5
    left_sign: int = 1
    speed_jitter: float = 0.0
    vehicles: list[VehicleSpec] = field(default_factory=list)

    def __post_init__(self):
        if self.lanes < 1:
            raise ConfigError("scenario needs at least one lane")
        if self.duration_s <= 0 or self.frame_rate <= 0:
            raise ConfigError("duration and frame rate must be positive")
        if self.left_sign not in (1, -1):
            raise ConfigError("left_sign must be +1 or -1")


def lane_center(lane_id: int, spec: ScenarioSpec) -> float:
    return (lane_id - 1) * spec.lane_width * spec.left_sign


def _lane_after(lane: int, direction: str, spec: ScenarioSpec) -> int:
    step = spec.left_sign if direction == "left" else -spec.left_sign
    new = lane + step
    if not 1 <= new <= spec.lanes:
        raise ConfigError(
            f"lane change to lane {new} leaves the road (1..{spec.lanes})"
        )
    return new


def _speed_profile(veh: VehicleSpec, times: np.ndarray) -> np.ndarray:
    v = np.full_like(times, veh.speed)
    for m in veh.maneuvers:
        if m.kind != "speed_ramp":
            continue
        tau = np.clip((times - m.start_s) / m.duration_s, 0.0, 1.0)
        v = v + m.delta * tau
    return v


def _lateral_profile(veh: VehicleSpec, times: np.ndarray, spec: ScenarioSpec):
    lat = np.full_like(times, lane_center(veh.lane, spec))
    vel = np.zeros_like(times)
    lanes = np.full(len(times), veh.lane, dtype=np.int64)
    lane = veh.lane
    for m in sorted(
        (m for m in veh.maneuvers if m.kind == "lane_change"), key=lambda m: m.start_s
    ):
        new_lane = _lane_after(lane, m.direction, spec)
        c0, c1 = lane_center(lane, spec), lane_center(new_lane, spec)
        tau = (times - m.start_s) / m.duration_s
        during = (tau >= 0.0) & (tau <= 1.0)
        after = tau > 1.0
        lat[during] = c0 + (c1 - c0) * 0.5 * (1.0 - np.cos(np.pi * tau[during]))
        lat[after] = c1
        vel[during] = (c1 - c0) * np.pi / (2.0 * m.duration_s) * np.sin(np.pi * tau[during])
        lanes[tau >= 0.5] = new_lane  # lane id flips at the crossing midpoint
        lane = new_lane
    return lat, vel, lanes


def synth_generate(spec: ScenarioSpec, seed: int = 0) -> dict[int, Track]:
    """Roll out every vehicle of the scenario into frame-indexed tracks."""
    rng = np.random.default_rng(seed)
    n_frames = int(round(spec.duration_s * spec.frame_rate))
    dt = 1.0 / spec.frame_rate
    times = np.arange(n_frames) * dt

    tracks: dict[int, Track] = {}
    for veh in spec.vehicles:
        if not 1 <= veh.lane <= spec.lanes:
            raise ConfigError(f"vehicle {veh.vehicle_id}: lane {veh.lane} out of range")
        jitter = rng.normal(0.0, spec.speed_jitter) if spec.speed_jitter > 0 else 0.0
        speeds = _speed_profile(veh, times) + jitter
        pos_lon = veh.pos_lon + np.concatenate([[0.0], np.cumsum(speeds[:-1] * dt)])
        pos_lat, vel_lat, lanes = _lateral_profile(veh, times, spec)
        track = Track(veh.vehicle_id)
        for k in range(n_frames):
            track.append(
                VehicleState(
                    vehicle_id=veh.vehicle_id,
                    frame=k,
                    pos_lon=float(pos_lon[k]),
                    pos_lat=float(pos_lat[k]),
                    vel_lon=float(speeds[k]),
                    vel_lat=float(vel_lat[k]),
                    lane_id=int(lanes[k]),
                    mass=veh.mass,
                )
            )
        tracks[veh.vehicle_id] = track
    return tracks


def write_csv(tracks: dict[int, Track], path):
    """Serialize tracks in the loader's canonical column order."""
    with open(path, "w", newline="") as fh:
        fh.write("frame,vehicle_id,pos_lon,pos_lat,lane_id,vel_lon,vel_lat,mass\n")
        for vid in sorted(tracks):
            for s in tracks[vid].states:
                fh.write(
                    f"{s.frame},{s.vehicle_id},{s.pos_lon!r},{s.pos_lat!r},"
                    f"{s.lane_id},{s.vel_lon!r},{s.vel_lat!r},{s.mass!r}\n"
                )


def scenario_from_dict(doc: dict) -> ScenarioSpec:
    """Parse a scenario document, rejecting unknown keys."""

    def take(d: dict, allowed: set[str], ctx: str) -> dict:
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"{ctx}: unknown keys {sorted(unknown)}")
        return d

    take(
        doc,
        {"lanes", "duration_s", "frame_rate", "lane_width", "left_sign",
         "speed_jitter", "vehicles"},
        "scenario",
    )
    vehicles = []
    for i, v in enumerate(doc.get("vehicles", [])):
        take(
            v,
            {"vehicle_id", "lane", "pos_lon", "speed", "maneuvers", "mass"},
            f"vehicles[{i}]",
        )
        maneuvers = []
        for j, m in enumerate(v.get("maneuvers", [])):
            take(
                m,
                {"kind", "start_s", "duration_s", "direction", "delta"},
                f"vehicles[{i}].maneuvers[{j}]",
            )
            maneuvers.append(Maneuver(**m))
        fields = {k: v[k] for k in ("vehicle_id", "lane", "pos_lon", "speed") if k in v}
        vehicles.append(VehicleSpec(maneuvers=maneuvers, mass=v.get("mass", 1.0), **fields))
    top = {k: doc[k] for k in doc if k != "vehicles"}
    return ScenarioSpec(vehicles=vehicles, **top)
