"""Track ingestion, gap repair, chronological splitting, scaling and windowing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

REQUIRED_COLUMNS = ("time", "latitude", "longitude", "bird_type")


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class TrackSeries:
    """Timestamped lat/lon samples. ``t`` is seconds since the series origin."""

    t: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    label: str = ""
    origin: float = 0.0  # absolute time of t=0: seconds after midnight, or POSIX seconds for ISO input

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        lat = np.asarray(self.lat, dtype=np.float64)
        lon = np.asarray(self.lon, dtype=np.float64)
        if not (t.shape == lat.shape == lon.shape) or t.ndim != 1:
            raise DataError(f"t/lat/lon must be 1-D of equal length, got {t.shape}, {lat.shape}, {lon.shape}")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise DataError("timestamps must be strictly increasing")
        if np.any(np.abs(lat) > 90) or np.any(np.abs(lon) > 180):
            raise DataError("coordinates out of range")
        for name, arr in (("t", t), ("lat", lat), ("lon", lon)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return int(self.t.size)

    def axis(self, name: str) -> np.ndarray:
        if name == "lat":
            return self.lat
        if name == "lon":
            return self.lon
        raise ValueError(f"axis must be 'lat' or 'lon', got {name!r}")

    def slice(self, start: int, stop: int) -> "TrackSeries":
        return TrackSeries(self.t[start:stop], self.lat[start:stop], self.lon[start:stop], self.label, self.origin)

    def shifted(self, dt: float) -> "TrackSeries":
        return TrackSeries(self.t + dt, self.lat, self.lon, self.label, self.origin)

    def at(self, t: float) -> int:
        """Index of the sample stamped exactly ``t``."""
        idx = int(np.searchsorted(self.t, t))
        if idx >= len(self) or self.t[idx] != t:
            raise KeyError(f"no sample at t={t}")
        return idx


def _parse_time(text: str) -> float:
    """Seconds after midnight for clock strings, POSIX seconds for ISO-8601."""
    text = text.strip()
    for fmt in ("%I:%M:%S %p", "%I:%M:%S.%f %p", "%H:%M:%S", "%H:%M:%S.%f"):
        try:
            d = datetime.strptime(text, fmt)
        except ValueError:
            continue
        return d.hour * 3600 + d.minute * 60 + d.second + d.microsecond / 1e6
    try:
        d = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise ValueError(f"unrecognised time {text!r}") from None
    return d.timestamp()


def _normalise_header(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


def ingest_csv(path) -> TrackSeries:
    """Read a ``time,latitude,longitude,bird_type`` CSV.

    Times may be ``H:MM:SS AM/PM`` clock strings or ISO-8601 stamps; they are
    returned as seconds since the first row.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, skipinitialspace=True)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: no data rows") from None
        cols = [_normalise_header(h) for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in cols]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = {c: cols.index(c) for c in REQUIRED_COLUMNS}

        times, lats, lons = [], [], []
        label = ""
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                tt = _parse_time(row[idx["time"]])
                la = float(row[idx["latitude"]])
                lo = float(row[idx["longitude"]])
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}: row {rownum}: {exc}") from None
            if not (math.isfinite(la) and math.isfinite(lo)):
                raise DataError(f"{path}: row {rownum}: non-finite coordinate")
            if abs(la) > 90 or abs(lo) > 180:
                raise DataError(f"{path}: row {rownum}: coordinate out of range")
            if times and tt <= times[-1]:
                raise DataError(f"{path}: row {rownum}: time does not increase")
            times.append(tt)
            lats.append(la)
            lons.append(lo)
            if not label and len(row) > idx["bird_type"]:
                label = row[idx["bird_type"]].strip()

    if not times:
        raise DataError(f"{path}: no data rows")
    t = np.asarray(times) - times[0]
    return TrackSeries(t, np.asarray(lats), np.asarray(lons), label, float(times[0]))


def interpolate_gaps(series: TrackSeries, resolution: float = 1.0) -> TrackSeries:
    """Resample onto ``t0, t0+res, ..., t_end`` by linear interpolation.

    Samples already on the grid come through unchanged.
    """
    if len(series) < 2:
        raise DataError("interpolation needs at least two samples")
    if resolution <= 0:
        raise DataError("resolution must be positive")
    t0, t_end = series.t[0], series.t[-1]
    n = int(math.floor((t_end - t0) / resolution + 1e-9)) + 1
    grid = t0 + resolution * np.arange(n)
    lat = np.interp(grid, series.t, series.lat)
    lon = np.interp(grid, series.t, series.lon)
    return TrackSeries(grid, lat, lon, series.label, series.origin)


def count_filled(original: TrackSeries, resampled: TrackSeries) -> int:
    """Grid points that had no original sample."""
    return int(len(resampled) - np.isin(resampled.t, original.t).sum())


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.65
    val_fraction: float = 0.15
    test_fraction: float = 0.20
    explicit_counts: tuple[int, int, int] | None = None

    def __post_init__(self):
        total = self.train_fraction + self.val_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise DataError(f"split fractions must sum to 1, got {total}")
        if min(self.train_fraction, self.val_fraction, self.test_fraction) < 0:
            raise DataError("split fractions must be non-negative")
        if self.explicit_counts is not None:
            object.__setattr__(self, "explicit_counts", tuple(int(c) for c in self.explicit_counts))

    def counts(self, n: int) -> tuple[int, int, int]:
        if self.explicit_counts is not None:
            if sum(self.explicit_counts) != n:
                raise DataError(f"explicit counts {self.explicit_counts} do not sum to series length {n}")
            return self.explicit_counts
        n_train = int(math.floor(self.train_fraction * n + 1e-9))
        n_test = int(math.floor(self.test_fraction * n + 1e-9))
        return n_train, n - n_train - n_test, n_test


def split(series: TrackSeries, spec: SplitSpec):
    """Contiguous chronological train | val | test partition."""
    n = len(series)
    if n < 3:
        raise DataError(f"cannot split a series of length {n}")
    n_train, n_val, n_test = spec.counts(n)
    if min(n_train, n_val, n_test) <= 0:
        raise DataError(f"split of {n} samples leaves an empty part: {(n_train, n_val, n_test)}")
    a, b = n_train, n_train + n_val
    return series.slice(0, a), series.slice(a, b), series.slice(b, n)


@dataclass(frozen=True)
class Scaler:
    """Affine map of ``[min, max]`` onto ``[0, 1]``."""

    min: float
    max: float

    def __post_init__(self):
        if not self.max > self.min:
            raise DataError(f"scaler needs max > min, got [{self.min}, {self.max}]")

    @classmethod
    def fit(cls, values) -> "Scaler":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise DataError("cannot fit a scaler on an empty series")
        return cls(float(values.min()), float(values.max()))

    def scale(self, x):
        return (np.asarray(x, dtype=np.float64) - self.min) / (self.max - self.min)

    def unscale(self, y):
        return np.asarray(y, dtype=np.float64) * (self.max - self.min) + self.min


def fit_scaler(train: TrackSeries, axis: str) -> Scaler:
    return Scaler.fit(train.axis(axis))


@dataclass(frozen=True)
class WindowedDataset:
    inputs: np.ndarray  # (n, L)
    targets: np.ndarray  # (n, M)

    def __post_init__(self):
        if self.inputs.ndim != 2 or self.targets.ndim != 2 or len(self.inputs) != len(self.targets):
            raise DataError(f"bad window shapes {self.inputs.shape} / {self.targets.shape}")

    @property
    def input_horizon(self) -> int:
        return self.inputs.shape[1]

    @property
    def prediction_horizon(self) -> int:
        return self.targets.shape[1]

    def __len__(self):
        return len(self.inputs)


def window_count(n: int, input_horizon: int, prediction_horizon: int, stride: int = 1) -> int:
    return (n - input_horizon - prediction_horizon) // stride + 1


def make_windows(series, input_horizon: int, prediction_horizon: int, stride: int = 1) -> WindowedDataset:
    series = np.asarray(series, dtype=np.float64)
    n = series.size
    if input_horizon < 1 or prediction_horizon < 1 or stride < 1:
        raise DataError("horizons and stride must be positive")
    if n < input_horizon + prediction_horizon:
        raise DataError(f"series of length {n} is shorter than {input_horizon}+{prediction_horizon}")
    count = window_count(n, input_horizon, prediction_horizon, stride)
    starts = np.arange(count) * stride
    span = np.lib.stride_tricks.sliding_window_view(series, input_horizon + prediction_horizon)[starts]
    return WindowedDataset(
        np.ascontiguousarray(span[:, :input_horizon]),
        np.ascontiguousarray(span[:, input_horizon:]),
    )


def partition_test_windows(test: TrackSeries, k: int, min_length: int = 0) -> list[TrackSeries]:
    """Cut ``test`` into ``k`` contiguous equal segments, remainder on the last."""
    n = len(test)
    if k < 1:
        raise DataError("k must be at least 1")
    if n < k * max(min_length, 1):
        raise DataError(f"test series of length {n} cannot hold {k} segments of {min_length}")
    size = n // k
    bounds = [i * size for i in range(k)] + [n]
    return [test.slice(bounds[i], bounds[i + 1]) for i in range(k)]


def write_track_csv(series: TrackSeries, path) -> None:
    """Write a track in the ingest format, stamping rows relative to ``series.origin``."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REQUIRED_COLUMNS)
        for t, la, lo in zip(series.t, series.lat, series.lon):
            w.writerow([format_time(series.origin + t), repr(float(la)), repr(float(lo)), series.label])


def format_time(seconds: float) -> str:
    """Clock string for times within a day, ISO-8601 (UTC) otherwise."""
    if 0 <= seconds < 86400:
        return format_clock(seconds)
    return datetime.fromtimestamp(seconds, tz=timezone.utc).isoformat()


def format_clock(seconds: float) -> str:
    s = int(round(seconds)) % 86400
    h, rem = divmod(s, 3600)
    m, sec = divmod(rem, 60)
    suffix = "AM" if h < 12 else "PM"
    h12 = h % 12 or 12
    return f"{h12}:{m:02d}:{sec:02d} {suffix}"
