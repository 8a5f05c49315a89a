"""Degree/meter conversions on a local tangent plane (spherical earth)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_M = 6_371_000.0
METERS_PER_DEGREE = 2.0 * math.pi * EARTH_RADIUS_M / 360.0


@dataclass(frozen=True)
class GeoRef:
    ref_lat: float

    def __post_init__(self):
        if not math.isfinite(self.ref_lat) or abs(self.ref_lat) > 90.0:
            raise ValueError(f"reference latitude must lie in [-90, 90], got {self.ref_lat}")

    @property
    def lon_scale(self) -> float:
        """Meters per degree of longitude at the reference latitude."""
        return METERS_PER_DEGREE * math.cos(math.radians(self.ref_lat))


def _check_finite(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _ret(arr):
    return float(arr) if arr.ndim == 0 else arr


def lat_deg_to_m(dlat):
    return _ret(_check_finite(dlat, "dlat") * METERS_PER_DEGREE)


def lon_deg_to_m(dlon, ref: GeoRef):
    return _ret(_check_finite(dlon, "dlon") * ref.lon_scale)


def m_to_lat_deg(meters):
    return _ret(_check_finite(meters, "meters") / METERS_PER_DEGREE)


def m_to_lon_deg(meters, ref: GeoRef):
    scale = ref.lon_scale
    if scale <= 0.0:
        raise ValueError("longitude is degenerate at the poles")
    return _ret(_check_finite(meters, "meters") / scale)


def deg_to_m(delta, axis: str, ref: GeoRef | None = None):
    if axis == "lat":
        return lat_deg_to_m(delta)
    if axis == "lon":
        if ref is None:
            raise ValueError("longitude conversion needs a reference latitude")
        return lon_deg_to_m(delta, ref)
    raise ValueError(f"axis must be 'lat' or 'lon', got {axis!r}")


def mae_meters(pred, truth, axis: str, ref: GeoRef | None = None) -> float:
    """Mean absolute error in meters between two degree series.

    For ``axis="lon"`` the caller supplies the reference latitude, which by
    convention is the mean latitude of the ground-truth segment.
    """
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: pred has {pred.size}, truth has {truth.size}")
    if pred.size == 0:
        raise ValueError("empty series")
    err = np.abs(np.asarray(deg_to_m(pred - truth, axis, ref), dtype=float))
    return float(err.mean())
