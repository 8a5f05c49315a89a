"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Criteria 4 and 5 train all eight models (four kinds x two axes) with the
reduced protocol on the bundled track; expect about 35 minutes on one core.
Deselect them with ``-m "not slow"`` for a quick pass.
"""

import time

import numpy as np
import pytest

from birdcast import modelfile
from birdcast.baselines import fit_poly, predict_poly
from birdcast.config import REDUCED_PROTOCOL, RunConfig, bundled_path, sample_track_path
from birdcast.data import SplitSpec, TrackSeries, fit_scaler, ingest_csv, make_windows, split
from birdcast.deconflict import RunwayConfig, detect_conflict, min_delay, runway_trajectory
from birdcast.forecast import direct_forecast, recursive_forecast
from birdcast.geo import GeoRef, lat_deg_to_m, lon_deg_to_m
from birdcast.nn import AdamState, ModelSpec, TrainConfig, adam_step, train
from birdcast.nn.models import KINDS
from birdcast.numerics import Rng
from birdcast.pipeline import aggregate_mae, evaluate_baseline, evaluate_model, prepare, train_axis
from support import finite_difference_grads, max_relative_error, toy_batch, toy_network

AXES = ("lat", "lon")


def test_criterion_01_gradient_check(record_criterion):
    start = time.perf_counter()
    worst = {}
    for kind in KINDS:
        net = toy_network(kind, "tanh", seed=0, L=5, M=3)
        X, Y = toy_batch(net)
        _, analytic = net.loss_and_grads(X, Y)
        worst[kind] = max_relative_error(analytic, finite_difference_grads(net, X, Y, eps=1e-5))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-4 and elapsed < 10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {elapsed:.1f} s"
    record_criterion(1, "BPTT vs finite differences", ok, detail)


def test_criterion_02_adam(record_criterion):
    steps = []
    for g in (1.0, -1.0):
        new, _ = adam_step({"w": np.array([0.0])}, {"w": np.array([g])}, AdamState(lr=0.001))
        steps.append(abs(new["w"][0]))
    w = {"w": np.array([0.25, -3.0])}
    zero, _ = adam_step(w, {"w": np.zeros(2)}, AdamState())
    ok = all(0.000999 <= s <= 0.001 for s in steps) and np.array_equal(zero["w"], w["w"])
    record_criterion(2, "Adam first step and zero gradient", ok, f"|dw| = {steps[0]:.10f}, {steps[1]:.10f}")


def test_criterion_03_deterministic_training(record_criterion):
    start = time.perf_counter()
    series = ingest_csv(sample_track_path())
    sc = fit_scaler(series.slice(0, 400), "lat")
    x = sc.scale(series.lat[:400])
    tr = make_windows(x[:250], 50, 1)
    va = make_windows(x[250:], 50, 1)
    assert len(tr) == 200
    texts = []
    for _ in range(2):
        spec = ModelSpec("vanilla", (30,), 50, 1, "relu", 17)
        m = train(spec, tr, va, TrainConfig(epochs=10), Rng(17), sc, "lat")
        texts.append(modelfile.dumps({"lat": m}, {"smoke": True}, 17))
    elapsed = time.perf_counter() - start
    ok = texts[0] == texts[1] and elapsed < 120
    record_criterion(3, "byte-identical model files", ok, f"{len(texts[0])} bytes each, identical={texts[0] == texts[1]}, {elapsed:.1f} s")


@pytest.fixture(scope="module")
def reduced_runs():
    """Train every kind on both axes once; criteria 4 and 5 share the results."""
    runs = {}
    base = RunConfig(**REDUCED_PROTOCOL)
    prep = prepare(base)
    for kind in KINDS:
        cfg = RunConfig(model=kind, **REDUCED_PROTOCOL)
        for axis in AXES:
            start = time.perf_counter()
            model = train_axis(cfg, prep, axis)
            evs = evaluate_model(model, prep, cfg.prediction_horizon)
            runs[kind, axis] = {
                "mae": aggregate_mae(evs),
                "per_set": [e.mae_m for e in evs],
                "seconds": time.perf_counter() - start,
            }
    return prep, runs


@pytest.mark.slow
def test_criterion_04_lstm_under_100m(reduced_runs, record_criterion):
    _, runs = reduced_runs
    ok = all(r["mae"] < 100.0 for r in runs.values())
    detail = "; ".join(f"{k[0]}/{k[1]} {r['mae']:.1f} m ({r['seconds'] / 60:.0f} min)" for k, r in runs.items())
    record_criterion(4, "every LSTM aggregate MAE < 100 m", ok, detail)


@pytest.mark.slow
def test_criterion_05_baseline_separation(reduced_runs, record_criterion):
    prep, runs = reduced_runs
    ok = True
    parts = []
    for axis in AXES:
        best = min(r["mae"] for (k, a), r in runs.items() if a == axis)
        lin = evaluate_baseline(prep, axis, 1, 300, 30)
        quart = evaluate_baseline(prep, axis, 4, 300, 30)
        lin_mae = aggregate_mae(lin)
        worse = sum(q.mae_m >= l.mae_m for q, l in zip(quart, lin))
        ok &= lin_mae >= 5 * best and worse >= 4
        parts.append(f"{axis}: linear {lin_mae:.0f} m = {lin_mae / best:.1f}x best LSTM, quartic >= linear on {worse}/5")
    record_criterion(5, "regression baselines separate", ok, "; ".join(parts))


def test_criterion_06_regression_exactness(record_criterion):
    t = np.arange(0.0, 100.0)
    line = fit_poly(t, 2 * t + 1, 1).raw_coefficients()
    tq = np.arange(-2.0, 3.0)
    quart = fit_poly(tq, tq ** 4, 4).raw_coefficients()
    err_line = np.max(np.abs(line - [1.0, 2.0]) / [1.0, 2.0])
    err_quart = max(abs(quart[4] - 1.0), np.max(np.abs(quart[:4])))
    ok = err_line < 1e-8 and err_quart < 1e-8
    record_criterion(6, "noiseless line and quartic recovered", ok, f"line {err_line:.1e}, quartic {err_quart:.1e}")


class _Stub:
    def __init__(self, step):
        self.step = step
        self.spec = ModelSpec("vanilla", (1,), 5, 1)

    def forward(self, w):
        return np.atleast_2d(w)[:, -1:] + self.step


def test_criterion_07_recursive_forecast_oracle(record_criterion):
    fixed = recursive_forecast(_Stub(0.0), [0.1, 0.2, 0.3, 0.4, 0.42], 30)
    ramp = recursive_forecast(_Stub(0.125), np.zeros(5), 8)
    spec = ModelSpec("encoder_decoder", (3, 2), 5, 30, "relu")
    from birdcast.nn import Network

    net = Network.initialise(spec)
    for k in net.params:
        net.params[k][...] = 0.0
    net.params["dense.b"][0] = 0.5
    direct = direct_forecast(net, np.ones(5))
    ok = (
        np.all(fixed == 0.42)
        and np.array_equal(ramp, 0.125 * np.arange(1, 9))
        and np.array_equal(direct, np.full(30, 0.5))
    )
    record_criterion(7, "stub fixed point, ramp and direct bias", ok, "exact equality on all three")


def test_criterion_08_deconfliction(record_criterion):
    cfg = RunwayConfig.load(bundled_path("runway_cle_06l_sample.json"))
    bird = ingest_csv(bundled_path("crossing_bird_forecast.csv"))
    start = time.perf_counter()
    rep = min_delay(cfg.runway, bird, cfg.eps_lat_m, cfg.eps_lon_m, cfg.max_delay_s, t_depart=0.0)
    elapsed = time.perf_counter() - start
    at3 = detect_conflict(runway_trajectory(cfg.runway, 3.0), bird, cfg.eps_lat_m, cfg.eps_lon_m)
    at4 = detect_conflict(runway_trajectory(cfg.runway, 4.0), bird, cfg.eps_lat_m, cfg.eps_lon_m)
    ok = rep.min_delay == 4 and at3 is not None and at4 is None and elapsed < 1.0
    record_criterion(8, "crossing scenario min_delay", ok,
                     f"min_delay={rep.min_delay} s, conflict at 3 s: {at3 is not None}, at 4 s: {at4 is not None}, {elapsed * 1e3:.0f} ms")


def test_criterion_09_geo(record_criterion):
    lat = lat_deg_to_m(1.0)
    lon = lon_deg_to_m(1.0, GeoRef(60.0))
    ok = abs(lat - 111194.93) <= 0.01 and abs(lon - lat / 2) <= 0.01
    record_criterion(9, "degree to meter conversions", ok, f"1 deg lat = {lat:.4f} m, 1 deg lon at 60 = {lon:.4f} m")


def test_criterion_10_data_pipeline(record_criterion):
    n = 14400
    series = TrackSeries(np.arange(n, dtype=float), np.full(n, 43.2), np.linspace(10.5, 10.6, n))
    parts = split(series, SplitSpec(explicit_counts=(9300, 2220, 2880)))
    counts = [len(p) for p in parts]
    windows = len(make_windows(np.zeros(9300), 300, 30, 1))
    ok = counts == [9300, 2220, 2880] and windows == 8971
    record_criterion(10, "split counts and window count", ok, f"split {counts}, windows {windows}")
