"""End-to-end glue: load, split, train per axis, evaluate on the test partitions."""

from __future__ import annotations

from dataclasses import dataclass

from .baselines import PolyForecaster, fit_track_trend
from .config import RunConfig
from .data import TrackSeries, fit_scaler, ingest_csv, interpolate_gaps, make_windows, partition_test_windows, split
from .forecast import ModelForecaster, OracleForecaster, SegmentEvaluation, aggregate_mae, evaluate
from .nn.models import ModelSpec
from .nn.train import TrainedModel, train
from .numerics import Rng


@dataclass
class Prepared:
    series: TrackSeries
    train: TrackSeries
    val: TrackSeries
    test: TrackSeries
    partitions: list[TrackSeries]


def load_track(path, resolution: float = 1.0) -> TrackSeries:
    return interpolate_gaps(ingest_csv(path), resolution)


def prepare(cfg: RunConfig, series: TrackSeries | None = None) -> Prepared:
    if series is None:
        series = load_track(cfg.data_path, cfg.resolution)
    tr, va, te = split(series, cfg.split_spec)
    parts = partition_test_windows(te, cfg.test_partitions, cfg.input_horizon + cfg.prediction_horizon)
    return Prepared(series, tr, va, te, parts)


def axis_seed(seed: int, axis: str) -> int:
    return seed * 2 + (0 if axis == "lat" else 1)


def train_axis(cfg: RunConfig, prep: Prepared, axis: str, on_epoch=None) -> TrainedModel:
    scaler = fit_scaler(prep.train, axis)
    M = cfg.model_horizon()
    L = cfg.input_horizon
    train_ds = make_windows(scaler.scale(prep.train.axis(axis)), L, M, cfg.window_stride)
    val_ds = make_windows(scaler.scale(prep.val.axis(axis)), L, M, 1)
    seed = axis_seed(cfg.seed, axis)
    spec = ModelSpec(cfg.kind, cfg.units_for(axis), L, M, cfg.cell_activation, seed)
    return train(spec, train_ds, val_ds, cfg.train_config(), Rng(seed), scaler, axis, on_epoch)


def evaluate_forecaster(forecaster, prep: Prepared, horizon: int, axis: str) -> list[SegmentEvaluation]:
    return [evaluate(forecaster, seg, horizon, axis) for seg in prep.partitions]


def evaluate_model(model: TrainedModel, prep: Prepared, horizon: int) -> list[SegmentEvaluation]:
    return evaluate_forecaster(ModelForecaster(model.network, model.scaler, model.axis), prep, horizon, model.axis)


def evaluate_baseline(prep: Prepared, axis: str, degree: int, context: int, horizon: int) -> list[SegmentEvaluation]:
    poly = fit_track_trend(prep.train, axis, degree)
    return evaluate_forecaster(PolyForecaster(poly, axis, context), prep, horizon, axis)


def evaluate_oracle(prep: Prepared, axis: str, context: int, horizon: int, offset_deg: float = 0.0):
    return evaluate_forecaster(OracleForecaster(axis, context, offset_deg), prep, horizon, axis)


__all__ = [
    "Prepared",
    "aggregate_mae",
    "axis_seed",
    "evaluate_baseline",
    "evaluate_forecaster",
    "evaluate_model",
    "evaluate_oracle",
    "load_track",
    "prepare",
    "train_axis",
]
