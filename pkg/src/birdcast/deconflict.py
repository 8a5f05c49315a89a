"""Takeoff ground-roll model, bird conflict detection and departure-delay search."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .data import TrackSeries
from .geo import METERS_PER_DEGREE, GeoRef, lat_deg_to_m, m_to_lat_deg, m_to_lon_deg


class NoSafeDelayError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunwaySpec:
    threshold_lat: float
    threshold_lon: float
    heading: float  # degrees true
    v_takeoff: float = 77.0  # m/s, roughly 150 kt rotation speed
    t_roll: float = 30.0  # s from brake release to v_takeoff

    def __post_init__(self):
        if not self.v_takeoff > 0:
            raise ValueError("v_takeoff must be positive")
        if not self.t_roll > 0:
            raise ValueError("t_roll must be positive")
        if not 0.0 <= self.heading < 360.0:
            raise ValueError("heading must lie in [0, 360)")
        GeoRef(self.threshold_lat)

    @property
    def acceleration(self) -> float:
        return self.v_takeoff / self.t_roll

    def distance(self, tau):
        tau = np.clip(np.asarray(tau, dtype=np.float64), 0.0, None)
        return 0.5 * self.acceleration * tau * tau

    def speed(self, tau):
        return self.acceleration * np.clip(np.asarray(tau, dtype=np.float64), 0.0, self.t_roll)


@dataclass(frozen=True)
class RunwayConfig:
    """On-disk runway/scenario settings; every key is required."""

    threshold_lat: float
    threshold_lon: float
    heading_deg: float
    v_takeoff_mps: float
    t_roll_s: float
    eps_lat_m: float
    eps_lon_m: float
    max_delay_s: int

    @classmethod
    def from_mapping(cls, d: dict) -> "RunwayConfig":
        values = {}
        # extra keys such as a descriptive "name" are ignored
        for f in fields(cls):
            if f.name not in d:
                raise KeyError(f"runway config is missing key {f.name!r}")
            try:
                values[f.name] = int(d[f.name]) if f.name == "max_delay_s" else float(d[f.name])
            except (TypeError, ValueError):
                raise ValueError(f"runway config key {f.name!r} is not a number: {d[f.name]!r}") from None
        cfg = cls(**values)
        if cfg.eps_lat_m <= 0 or cfg.eps_lon_m <= 0:
            raise ValueError("conflict thresholds must be positive")
        if cfg.max_delay_s < 0:
            raise ValueError("max_delay_s must be non-negative")
        cfg.runway  # validates the geometry
        return cfg

    @classmethod
    def load(cls, path) -> "RunwayConfig":
        with Path(path).open(encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))

    @property
    def runway(self) -> RunwaySpec:
        return RunwaySpec(self.threshold_lat, self.threshold_lon, self.heading_deg, self.v_takeoff_mps, self.t_roll_s)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def runway_trajectory(spec: RunwaySpec, t_depart: float, step: float = 1.0) -> TrackSeries:
    """Aircraft position every ``step`` seconds from brake release to the end of the roll."""
    n = int(math.floor(spec.t_roll / step + 1e-9)) + 1
    tau = step * np.arange(n)
    s = spec.distance(tau)
    h = math.radians(spec.heading)
    ref = GeoRef(spec.threshold_lat)
    lat = spec.threshold_lat + m_to_lat_deg(s * math.cos(h))
    lon = spec.threshold_lon + m_to_lon_deg(s * math.sin(h), ref)
    return TrackSeries(t_depart + tau, lat, lon, "aircraft")


@dataclass
class ConflictEvent:
    t: float
    aircraft_pos: tuple[float, float]
    bird_pos: tuple[float, float]
    sep_lat_m: float
    sep_lon_m: float


def separations(aircraft: TrackSeries, bird: TrackSeries):
    """Per-shared-second absolute separations ``(t, sep_lat_m, sep_lon_m, ia, ib)``."""
    t, ia, ib = np.intersect1d(aircraft.t, bird.t, assume_unique=True, return_indices=True)
    if t.size == 0:
        raise ValueError("aircraft and bird series share no timestamps")
    ref_lat = 0.5 * (aircraft.lat[ia] + bird.lat[ib])
    sep_lat = np.abs(lat_deg_to_m(aircraft.lat[ia] - bird.lat[ib]))
    sep_lon = np.abs(aircraft.lon[ia] - bird.lon[ib]) * METERS_PER_DEGREE * np.cos(np.radians(ref_lat))
    return t, np.atleast_1d(sep_lat), np.atleast_1d(sep_lon), ia, ib


def conflict_mask(sep_lat, sep_lon, eps_lat: float, eps_lon: float, mode: str = "box"):
    if mode == "box":
        return (sep_lat < eps_lat) & (sep_lon < eps_lon)
    if mode == "euclidean":
        # eps_lat doubles as the radius
        return np.hypot(sep_lat, sep_lon) < eps_lat
    raise ValueError(f"unknown conflict mode {mode!r}")


def detect_conflict(aircraft: TrackSeries, bird: TrackSeries, eps_lat: float = 50.0, eps_lon: float = 50.0,
                    mode: str = "box") -> ConflictEvent | None:
    """Earliest shared second at which both axis separations are under threshold."""
    t, sep_lat, sep_lon, ia, ib = separations(aircraft, bird)
    hits = np.flatnonzero(conflict_mask(sep_lat, sep_lon, eps_lat, eps_lon, mode))
    if hits.size == 0:
        return None
    k = hits[0]
    return ConflictEvent(
        t=float(t[k]),
        aircraft_pos=(float(aircraft.lat[ia[k]]), float(aircraft.lon[ia[k]])),
        bird_pos=(float(bird.lat[ib[k]]), float(bird.lon[ib[k]])),
        sep_lat_m=float(sep_lat[k]),
        sep_lon_m=float(sep_lon[k]),
    )


@dataclass
class SeparationTrace:
    delay: int
    t: np.ndarray
    sep_lat_m: np.ndarray
    sep_lon_m: np.ndarray
    conflict: np.ndarray


@dataclass
class ConflictReport:
    conflict: ConflictEvent | None
    min_delay: int
    t_depart: float
    trace: SeparationTrace
    delayed_trace: SeparationTrace
    conflicts_by_delay: dict[int, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        ev = self.conflict
        return {
            "min_delay_s": self.min_delay,
            "t_depart": self.t_depart,
            "undelayed_conflict": None if ev is None else {
                "t": ev.t,
                "aircraft_pos": list(ev.aircraft_pos),
                "bird_pos": list(ev.bird_pos),
                "sep_lat_m": ev.sep_lat_m,
                "sep_lon_m": ev.sep_lon_m,
            },
            "conflicts_by_delay": {str(k): v for k, v in self.conflicts_by_delay.items()},
        }


def _trace(spec, bird, t_depart, delay, eps_lat, eps_lon, mode):
    aircraft = runway_trajectory(spec, t_depart + delay)
    t, sep_lat, sep_lon, _, _ = separations(aircraft, bird)
    return SeparationTrace(delay, t, sep_lat, sep_lon, conflict_mask(sep_lat, sep_lon, eps_lat, eps_lon, mode))


def min_delay(spec: RunwaySpec, bird_forecast: TrackSeries, eps_lat: float = 50.0, eps_lon: float = 50.0,
              max_delay: int = 10, t_depart: float | None = None, mode: str = "box") -> ConflictReport:
    """Smallest whole-second departure delay whose ground roll is conflict free."""
    if t_depart is None:
        t_depart = float(bird_forecast.t[0])
    need_end = t_depart + spec.t_roll + max_delay
    if bird_forecast.t[0] > t_depart or bird_forecast.t[-1] < math.floor(need_end + 1e-9):
        raise ValueError(
            f"bird forecast covers [{bird_forecast.t[0]}, {bird_forecast.t[-1]}], "
            f"needs [{t_depart}, {need_end}]"
        )
    undelayed = runway_trajectory(spec, t_depart)
    first = detect_conflict(undelayed, bird_forecast, eps_lat, eps_lon, mode)
    seen: dict[int, bool] = {}
    for d in range(int(max_delay) + 1):
        hit = detect_conflict(runway_trajectory(spec, t_depart + d), bird_forecast, eps_lat, eps_lon, mode)
        seen[d] = hit is not None
        if hit is None:
            return ConflictReport(
                conflict=first,
                min_delay=d,
                t_depart=t_depart,
                trace=_trace(spec, bird_forecast, t_depart, 0, eps_lat, eps_lon, mode),
                delayed_trace=_trace(spec, bird_forecast, t_depart, d, eps_lat, eps_lon, mode),
                conflicts_by_delay=seen,
            )
    raise NoSafeDelayError(f"no safe delay within horizon (checked 0..{max_delay} s)")


def crossing_bird(spec: RunwaySpec, along_m: float, cross_speed: float, t_cross: float,
                  t0: float = 0.0, duration: int = 60) -> TrackSeries:
    """A bird flying straight across the runway centreline.

    It crosses ``along_m`` meters past the threshold at time ``t_cross``,
    moving right-to-left relative to the takeoff direction at ``cross_speed`` m/s.
    """
    t = t0 + np.arange(duration + 1, dtype=float)
    h = math.radians(spec.heading)
    cross = -cross_speed * (t - t_cross)  # meters right of the centreline
    east = along_m * math.sin(h) + cross * math.cos(h)
    north = along_m * math.cos(h) - cross * math.sin(h)
    ref = GeoRef(spec.threshold_lat)
    lat = spec.threshold_lat + m_to_lat_deg(north)
    lon = spec.threshold_lon + m_to_lon_deg(east, ref)
    return TrackSeries(t, lat, lon, "bird forecast")
