"""Multi-step forecasting and block-wise MAE evaluation over test segments.

Every forecaster answers one question: given a segment and the indices where
forecast blocks start, what are the next ``horizon`` values (in degrees)?
Trained networks answer it from the ``L`` preceding samples; the oracle and
polynomial baselines answer it from the segment itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Scaler, TrackSeries
from .geo import GeoRef, deg_to_m


def recursive_forecast(model, window, horizon: int) -> np.ndarray:
    """Roll a one-step model forward, feeding each output back in as the newest input.

    ``window`` may be a single window (L,) or a batch (B, L); the result has
    shape (horizon,) or (B, horizon) to match.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    w = np.asarray(window, dtype=np.float64)
    single = w.ndim == 1
    w = np.atleast_2d(w).copy()
    out = np.empty((w.shape[0], horizon))
    for k in range(horizon):
        y = np.asarray(model.forward(w), dtype=np.float64).reshape(w.shape[0], -1)[:, 0]
        out[:, k] = y
        w[:, :-1] = w[:, 1:]
        w[:, -1] = y
    return out[0] if single else out


def direct_forecast(model, window) -> np.ndarray:
    spec = getattr(model, "spec", None)
    if spec is None or spec.kind != "encoder_decoder":
        raise ValueError("direct forecasting needs an encoder_decoder model")
    w = np.asarray(window, dtype=np.float64)
    y = model.forward(w)
    return y[0] if w.ndim == 1 else y


class ModelForecaster:
    """Adapts a trained network (plus its scaler) to degree-space block forecasts."""

    def __init__(self, model, scaler: Scaler, axis: str):
        self.model = model
        self.scaler = scaler
        self.axis = axis
        self.context = model.spec.input_horizon

    def predict_blocks(self, segment: TrackSeries, starts, horizon: int) -> np.ndarray:
        values = self.scaler.scale(segment.axis(self.axis))
        L = self.context
        ctx = np.stack([values[s - L:s] for s in starts])
        if self.model.spec.many_to_one:
            scaled = recursive_forecast(self.model, ctx, horizon)
        else:
            if horizon > self.model.spec.prediction_horizon:
                raise ValueError(
                    f"encoder_decoder emits {self.model.spec.prediction_horizon} steps, {horizon} requested"
                )
            scaled = direct_forecast(self.model, ctx)[:, :horizon]
        return self.scaler.unscale(scaled)


class OracleForecaster:
    """Returns the truth, optionally shifted by a constant offset in degrees."""

    def __init__(self, axis: str, context: int, offset_deg: float = 0.0):
        self.axis = axis
        self.context = context
        self.offset_deg = offset_deg

    def predict_blocks(self, segment: TrackSeries, starts, horizon: int) -> np.ndarray:
        values = segment.axis(self.axis)
        return np.stack([values[s:s + horizon] for s in starts]) + self.offset_deg


@dataclass
class ForecastResult:
    window_start: float  # time of the first forecast sample
    horizon: int
    predicted: np.ndarray
    truth: np.ndarray
    mae_deg: float
    mae_m: float


@dataclass
class SegmentEvaluation:
    axis: str
    results: list[ForecastResult] = field(default_factory=list)
    mae_m: float = 0.0
    mae_deg: float = 0.0
    step_mae_m: np.ndarray | None = None  # error by lead time k = 1..horizon
    ref_lat: float = 0.0

    @property
    def n_steps(self) -> int:
        return sum(r.horizon for r in self.results)


def block_starts(n: int, context: int, horizon: int) -> list[int]:
    """Start indices of non-overlapping full blocks after the first ``context`` samples."""
    return list(range(context, n - horizon + 1, horizon))


def evaluate(forecaster, segment: TrackSeries, horizon: int = 30, axis: str | None = None) -> SegmentEvaluation:
    """Forecast consecutive blocks of ``horizon`` steps and score them in meters.

    The first ``forecaster.context`` samples only seed the first block. The
    longitude reference latitude is the mean latitude over the scored span.
    """
    axis = axis or forecaster.axis
    L = forecaster.context
    n = len(segment)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if n < L + horizon:
        raise ValueError(f"segment of {n} samples is shorter than context {L} + horizon {horizon}")
    starts = block_starts(n, L, horizon)
    pred = np.asarray(forecaster.predict_blocks(segment, starts, horizon), dtype=np.float64)
    values = segment.axis(axis)
    truth = np.stack([values[s:s + horizon] for s in starts])
    ref = GeoRef(float(np.mean(segment.lat[starts[0]:starts[-1] + horizon])))
    err_deg = pred - truth
    err_m = np.abs(np.asarray(deg_to_m(err_deg, axis, ref)))
    results = [
        ForecastResult(
            window_start=float(segment.t[s]),
            horizon=horizon,
            predicted=pred[i],
            truth=truth[i],
            mae_deg=float(np.mean(np.abs(err_deg[i]))),
            mae_m=float(np.mean(err_m[i])),
        )
        for i, s in enumerate(starts)
    ]
    return SegmentEvaluation(
        axis=axis,
        results=results,
        mae_m=float(err_m.mean()),
        mae_deg=float(np.abs(err_deg).mean()),
        step_mae_m=err_m.mean(axis=0),
        ref_lat=ref.ref_lat,
    )


def aggregate_mae(evaluations) -> float:
    """Mean error over every forecast step of several segment evaluations."""
    total = sum(e.mae_m * e.n_steps for e in evaluations)
    return total / sum(e.n_steps for e in evaluations)
