"""Run configuration: every setting of a training and evaluation run, with validated defaults."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

from .data import SplitSpec
from .nn.models import DEFAULT_UNITS, KINDS, ModelSpec, canonical_kind
from .nn.train import TrainConfig
from .numerics import ACTIVATIONS

AXES = ("lat", "lon")

# Reduced protocol: fewer epochs, every third training window.
REDUCED_PROTOCOL = {"epochs": 25, "window_stride": 3}


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("birdcast") / "resources" / name))


def sample_track_path() -> Path:
    return bundled_path("pigeon_synthetic_excerpt.csv")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    data: str = ""
    train_fraction: float = 0.65
    val_fraction: float = 0.15
    test_fraction: float = 0.20
    split_counts: list[int] | None = field(default_factory=lambda: [9300, 2220, 2880])
    resolution: float = 1.0
    input_horizon: int = 300
    prediction_horizon: int = 30
    model: str = "vanilla"
    layer_units: dict[str, list[int]] | None = None  # per axis; None -> per-kind defaults
    cell_activation: str = "relu"
    loss: str = "mse"
    batch_size: int = 32
    learning_rate: float = 0.001
    epochs: int = 100
    window_stride: int = 1
    clip_norm: float | None = 1.0
    seed: int = 0
    test_partitions: int = 5
    axes: list[str] = field(default_factory=lambda: list(AXES))
    output_dir: str = "runs/default"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with Path(path).open(encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def data_path(self) -> Path:
        return Path(self.data) if self.data else sample_track_path()

    @property
    def split_spec(self) -> SplitSpec:
        counts = tuple(self.split_counts) if self.split_counts else None
        return SplitSpec(self.train_fraction, self.val_fraction, self.test_fraction, counts)

    @property
    def kind(self) -> str:
        return canonical_kind(self.model)

    def units_for(self, axis: str) -> tuple[int, ...]:
        if self.layer_units and axis in self.layer_units:
            return tuple(self.layer_units[axis])
        return DEFAULT_UNITS[(self.kind, axis)]

    def model_horizon(self) -> int:
        return self.prediction_horizon if self.kind == "encoder_decoder" else 1

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            lr=self.learning_rate,
            loss=self.loss,
            clip_norm=self.clip_norm,
        )

    def validate(self) -> None:
        try:
            canonical_kind(self.model)
            self.split_spec
            self.train_config().validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.cell_activation not in ACTIVATIONS:
            raise ConfigError(f"cell_activation must be one of {sorted(ACTIVATIONS)}")
        for name in ("input_horizon", "prediction_horizon", "window_stride", "test_partitions"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.resolution <= 0:
            raise ConfigError("resolution must be positive")
        bad = [a for a in self.axes if a not in AXES]
        if bad or not self.axes:
            raise ConfigError(f"axes must be a non-empty subset of {AXES}")
        if self.layer_units:
            for axis, units in self.layer_units.items():
                if axis not in AXES:
                    raise ConfigError(f"layer_units has unknown axis {axis!r}")
                try:
                    ModelSpec(self.kind, tuple(units), self.input_horizon, self.model_horizon())
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None


__all__ = ["AXES", "KINDS", "REDUCED_PROTOCOL", "ConfigError", "RunConfig", "bundled_path", "sample_track_path"]
