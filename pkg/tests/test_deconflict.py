import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from birdcast.config import bundled_path
from birdcast.data import TrackSeries, ingest_csv
from birdcast.deconflict import (
    NoSafeDelayError,
    RunwayConfig,
    RunwaySpec,
    crossing_bird,
    detect_conflict,
    min_delay,
    runway_trajectory,
    separations,
)
from birdcast.geo import GeoRef, lat_deg_to_m, lon_deg_to_m, m_to_lat_deg, m_to_lon_deg

P = (41.40, -81.86)
REF = GeoRef(P[0])
RUNWAY = RunwaySpec(41.4030, -81.8600, 50.0)


def _track(t, north_m, east_m, origin=P):
    t = np.asarray(t, dtype=float)
    lat = origin[0] + m_to_lat_deg(np.asarray(north_m, dtype=float))
    lon = origin[1] + m_to_lon_deg(np.asarray(east_m, dtype=float), REF)
    return TrackSeries(t, lat, lon)


def test_trajectory_starts_at_threshold():
    tr = runway_trajectory(RUNWAY, 100.0)
    assert (tr.lat[0], tr.lon[0]) == (RUNWAY.threshold_lat, RUNWAY.threshold_lon)
    assert tr.t[0] == 100.0 and tr.t[-1] == 130.0 and len(tr) == 31


def test_roll_distance_at_rotation():
    assert RUNWAY.distance(30.0) == pytest.approx(1155.0, rel=1e-12)
    tr = runway_trajectory(RUNWAY, 0.0)
    north = lat_deg_to_m(tr.lat[-1] - RUNWAY.threshold_lat)
    east = lon_deg_to_m(tr.lon[-1] - RUNWAY.threshold_lon, GeoRef(RUNWAY.threshold_lat))
    assert np.hypot(north, east) == pytest.approx(1155.0, rel=1e-9)


def test_eastbound_roll_keeps_latitude():
    tr = runway_trajectory(RunwaySpec(41.4, -81.86, 90.0), 0.0)
    assert np.max(np.abs(tr.lat - 41.4)) < 1e-9


def test_roll_kinematics():
    tau = np.linspace(0, 30, 301)
    assert np.all(np.diff(RUNWAY.distance(tau)) >= 0)
    assert RUNWAY.speed(30.0) == pytest.approx(77.0, abs=1e-9)


@pytest.mark.parametrize("kwargs", [dict(v_takeoff=0.0), dict(t_roll=-1.0), dict(heading=360.0)])
def test_runway_validation(kwargs):
    with pytest.raises(ValueError):
        RunwaySpec(41.4, -81.86, **{"heading": 50.0, **kwargs})


def test_identical_tracks_conflict_immediately():
    tr = runway_trajectory(RUNWAY, 5.0)
    ev = detect_conflict(tr, tr)
    assert ev.t == 5.0 and ev.sep_lat_m == 0.0 and ev.sep_lon_m == 0.0


def test_distant_tracks_never_conflict():
    t = np.arange(40)
    assert detect_conflict(_track(t, 0 * t, 60.0 * t), _track(t, 10_000 + 0 * t, 0 * t)) is None


def _crossing(bird_cross_t):
    t = np.arange(0, 41)
    aircraft = _track(t, 0 * t, 60.0 * (t - 12))  # eastbound, over P at t=12
    bird = _track(t, 10.0 * (t - bird_cross_t), 0 * t)  # northbound, over P at bird_cross_t
    return aircraft, bird


def test_constructed_crossing():
    ev = detect_conflict(*_crossing(12))
    assert ev is not None and ev.t == 12.0
    assert detect_conflict(*_crossing(20)) is None


def test_no_shared_time():
    with pytest.raises(ValueError):
        detect_conflict(_track([0, 1], [0, 0], [0, 0]), _track([5, 6], [0, 0], [0, 0]))


def test_euclidean_mode_is_stricter_on_diagonals():
    t = np.arange(3)
    a = _track(t, 0 * t, 0 * t)
    b = _track(t, 40.0 + 0 * t, 40.0 + 0 * t)
    assert detect_conflict(a, b, 50, 50, "box") is not None
    assert detect_conflict(a, b, 50, 50, "euclidean") is None


def test_clear_bird_needs_no_delay():
    bird = crossing_bird(RUNWAY, -10_000.0, 5.0, 15.0)
    assert min_delay(RUNWAY, bird).min_delay == 0


def test_crossing_needs_four_seconds():
    bird = crossing_bird(RUNWAY, 600.0, 5.0, 15.0)
    rep = min_delay(RUNWAY, bird, 50, 50, 10, t_depart=0.0)
    assert rep.min_delay == 4
    assert rep.conflict is not None
    assert rep.conflicts_by_delay == {0: True, 1: True, 2: True, 3: True, 4: False}
    assert detect_conflict(runway_trajectory(RUNWAY, 3.0), bird) is not None
    assert detect_conflict(runway_trajectory(RUNWAY, 4.0), bird) is None


def test_hovering_bird_is_unsatisfiable():
    t = np.arange(0, 60)
    s = RUNWAY.distance(15.0)
    h = np.radians(RUNWAY.heading)
    bird = TrackSeries(
        t,
        np.full(t.size, RUNWAY.threshold_lat + m_to_lat_deg(s * np.cos(h))),
        np.full(t.size, RUNWAY.threshold_lon + m_to_lon_deg(s * np.sin(h), GeoRef(RUNWAY.threshold_lat))),
    )
    with pytest.raises(NoSafeDelayError, match="no safe delay within horizon"):
        min_delay(RUNWAY, bird, max_delay=10, t_depart=0.0)


def test_forecast_must_cover_the_search():
    bird = crossing_bird(RUNWAY, 600.0, 5.0, 15.0, duration=35)
    with pytest.raises(ValueError, match="covers"):
        min_delay(RUNWAY, bird, max_delay=10, t_depart=0.0)


def test_bundled_scenarios():
    cfg = RunwayConfig.load(bundled_path("runway_cle_06l_sample.json"))
    crossing = ingest_csv(bundled_path("crossing_bird_forecast.csv"))
    clear = ingest_csv(bundled_path("clear_bird_forecast.csv"))
    kw = dict(eps_lat=cfg.eps_lat_m, eps_lon=cfg.eps_lon_m, max_delay=cfg.max_delay_s, t_depart=0.0)
    assert min_delay(cfg.runway, crossing, **kw).min_delay == 4
    assert min_delay(cfg.runway, clear, **kw).min_delay == 0


def test_runway_config_missing_key(tmp_path):
    d = json.loads(bundled_path("runway_cle_06l_sample.json").read_text())
    del d["t_roll_s"]
    with pytest.raises(KeyError, match="t_roll_s"):
        RunwayConfig.from_mapping(d)


@settings(max_examples=40, deadline=None)
@given(st.floats(100, 1100), st.floats(2, 15), st.floats(5, 25), st.integers(0, 6))
def test_min_delay_is_minimal(along, speed, t_cross, max_delay):
    bird = crossing_bird(RUNWAY, along, speed, t_cross, duration=80)
    try:
        rep = min_delay(RUNWAY, bird, max_delay=max_delay, t_depart=0.0)
    except NoSafeDelayError:
        for d in range(max_delay + 1):
            assert detect_conflict(runway_trajectory(RUNWAY, float(d)), bird) is not None
        return
    d = rep.min_delay
    assert detect_conflict(runway_trajectory(RUNWAY, float(d)), bird) is None
    for earlier in range(d):
        assert detect_conflict(runway_trajectory(RUNWAY, float(earlier)), bird) is not None


@settings(max_examples=30, deadline=None)
@given(st.floats(100, 1100), st.floats(2, 15), st.floats(5, 25), st.integers(-500, 500))
def test_min_delay_shift_invariant(along, speed, t_cross, shift):
    bird = crossing_bird(RUNWAY, along, speed, t_cross, duration=80)
    try:
        base = min_delay(RUNWAY, bird, max_delay=8, t_depart=0.0).min_delay
    except NoSafeDelayError:
        base = None
    try:
        moved = min_delay(RUNWAY, bird.shifted(shift), max_delay=8, t_depart=float(shift)).min_delay
    except NoSafeDelayError:
        moved = None
    assert base == moved


@settings(max_examples=40)
@given(st.integers(0, 2**31))
def test_detection_is_symmetric(seed):
    rng = np.random.default_rng(seed)
    t = np.arange(20)
    a = _track(t, np.cumsum(rng.normal(0, 20, 20)), np.cumsum(rng.normal(0, 20, 20)))
    b = _track(t, np.cumsum(rng.normal(0, 20, 20)), np.cumsum(rng.normal(0, 20, 20)))
    ab, ba = detect_conflict(a, b), detect_conflict(b, a)
    assert (ab is None) == (ba is None)
    if ab is not None:
        assert ab.t == ba.t and ab.sep_lat_m == ba.sep_lat_m and ab.sep_lon_m == ba.sep_lon_m
    sa, sb = separations(a, b), separations(b, a)
    np.testing.assert_array_equal(sa[1], sb[1])
    np.testing.assert_array_equal(sa[2], sb[2])
