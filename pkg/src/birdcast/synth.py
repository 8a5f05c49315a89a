"""Synthetic pigeon-like GPS track used as the bundled sample dataset.

The track is *simulated*, not recorded. It imitates a loft pigeon logged at
1 Hz: spells of flight at 12-20 m/s with smoothly wandering heading and a pull
back toward the loft, separated by perches (GPS jitter only) and slow walking
bouts. It starts from a real loft position near Pisa so the coordinates are
plausible, but every later sample comes from the simulator below.
"""

from __future__ import annotations

import math

import numpy as np

from .data import TrackSeries
from .geo import GeoRef, m_to_lat_deg, m_to_lon_deg

START_LAT = 43.215031
START_LON = 10.5719799


def simulate_pigeon_track(
    n: int = 14400,
    seed: int = 20230501,
    start_lat: float = START_LAT,
    start_lon: float = START_LON,
    gps_noise_m: float = 1.0,
) -> TrackSeries:
    rng = np.random.default_rng(seed)
    ref = GeoRef(start_lat)
    # loft sits 1.2 km north of the first fix; the opening flight heads south, away from it
    loft = np.array([0.0, 1200.0])
    pos = np.zeros(2)  # east, north in meters from the first fix
    heading = math.radians(176.0)  # compass, clockwise from north
    speed = 18.0
    turn_rate = 0.0

    east = np.empty(n)
    north = np.empty(n)
    state, remaining = "flight", 420
    cruise = 17.0
    for k in range(n):
        if remaining <= 0:
            state, remaining = _next_state(state, rng)
            if state == "flight":
                cruise = rng.uniform(13.0, 19.0)
                heading = rng.uniform(0, 2 * math.pi)
                speed = 4.0
        remaining -= 1

        if state == "flight":
            to_loft = loft - pos
            dist = float(np.hypot(*to_loft))
            # heading (clockwise from north) that points at the loft
            home = math.atan2(to_loft[0], to_loft[1])
            err = (home - heading + math.pi) % (2 * math.pi) - math.pi
            pull = 0.0 if dist < 1500.0 else min((dist - 1500.0) / 2500.0, 1.0) * 0.03
            turn_rate = 0.97 * turn_rate + rng.normal(0.0, 0.004) + pull * err
            turn_rate = max(min(turn_rate, 0.12), -0.12)
            heading += turn_rate
            speed += 0.05 * (cruise - speed) + rng.normal(0.0, 0.15)
            step = speed * np.array([math.sin(heading), math.cos(heading)])
        elif state == "walk":
            heading += rng.normal(0.0, 0.3)
            step = rng.uniform(0.0, 0.8) * np.array([math.sin(heading), math.cos(heading)])
            speed = 0.0
        else:
            step = np.zeros(2)
            speed = 0.0
        pos = pos + step
        east[k] = pos[0]
        north[k] = pos[1]

    east = east + rng.normal(0.0, gps_noise_m, n)
    north = north + rng.normal(0.0, gps_noise_m, n)
    east -= east[0]
    north -= north[0]
    lat = start_lat + m_to_lat_deg(north)
    lon = start_lon + m_to_lon_deg(east, ref)
    return TrackSeries(np.arange(n, dtype=float), lat, lon, "Pigeon (synthetic)")


def _next_state(current: str, rng) -> tuple[str, int]:
    if current == "flight":
        state = "perch" if rng.random() < 0.6 else "walk"
    else:
        state = "flight" if rng.random() < 0.75 else ("walk" if current == "perch" else "perch")
    lo, hi = {"flight": (180, 900), "perch": (120, 700), "walk": (120, 500)}[state]
    return state, int(rng.integers(lo, hi))
