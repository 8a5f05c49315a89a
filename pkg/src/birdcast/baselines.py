"""Least-squares polynomial trends in time, used as benchmark forecasters.

The straight line (degree 1) and quartic (degree 4) are fitted to the whole
training span and then simply evaluated at later times, so they extrapolate the
training trend into the test segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import solve_triangular

from .data import TrackSeries


class RankDeficientError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class PolyModel:
    degree: int
    coeffs: np.ndarray  # c0..cd in the normalised time variable
    t_offset: float
    t_scale: float

    def normalise(self, t):
        return (np.asarray(t, dtype=np.float64) - self.t_offset) / self.t_scale

    def raw_coefficients(self) -> np.ndarray:
        """Coefficients in the original time variable, lowest power first."""
        u = Polynomial([-self.t_offset / self.t_scale, 1.0 / self.t_scale])
        raw = Polynomial(self.coeffs)(u).coef
        return np.pad(raw, (0, self.degree + 1 - raw.size))


def fit_poly(t, y, degree: int) -> PolyModel:
    """Least-squares polynomial fit via Householder QR on [-1, 1]-normalised time."""
    t = np.asarray(t, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if t.shape != y.shape:
        raise ValueError(f"t has {t.size} values, y has {y.size}")
    if np.unique(t).size < degree + 1:
        raise RankDeficientError(f"degree {degree} needs at least {degree + 1} distinct times")
    lo, hi = float(t.min()), float(t.max())
    offset = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) or 1.0
    u = (t - offset) / half
    V = np.vander(u, degree + 1, increasing=True)
    Q, R = np.linalg.qr(V, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * max(diag.max(), 1.0):
        raise RankDeficientError("design matrix is rank deficient")
    coeffs = solve_triangular(R, Q.T @ y, lower=False)
    if not np.all(np.isfinite(coeffs)):
        raise RankDeficientError("non-finite coefficients")
    return PolyModel(degree, coeffs, offset, half)


def predict_poly(model: PolyModel, t) -> np.ndarray:
    # Horner in the normalised variable; extrapolation is allowed and unbounded.
    u = model.normalise(t)
    out = np.zeros_like(u)
    for c in model.coeffs[::-1]:
        out = out * u + c
    return out


def fit_track_trend(train: TrackSeries, axis: str, degree: int) -> PolyModel:
    return fit_poly(train.t, train.axis(axis), degree)


class PolyForecaster:
    """Block forecaster that reads the fitted trend at the block's timestamps."""

    def __init__(self, model: PolyModel, axis: str, context: int):
        self.model = model
        self.axis = axis
        self.context = context

    def predict_blocks(self, segment: TrackSeries, starts, horizon: int) -> np.ndarray:
        return np.stack([predict_poly(self.model, segment.t[s:s + horizon]) for s in starts])
