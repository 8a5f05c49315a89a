"""Mini-batch training with validation-based weight selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..data import Scaler, WindowedDataset
from ..numerics import Rng
from .models import ModelSpec, Network, loss
from .optim import AdamState, adam_step, clip_by_global_norm

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    lr: float = 0.001
    loss: str = "mse"
    clip_norm: float | None = 1.0
    truncate: int | None = None  # smoke tests only

    def validate(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.lr > 0:
            raise ValueError("learning rate must be positive")
        if self.loss not in ("mse", "mae"):
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass
class TrainedModel:
    """Weights from the best validation epoch, plus everything needed to reuse them."""

    network: Network
    scaler: Scaler | None
    history: list[tuple[float, float]] = field(default_factory=list)
    best_epoch: int = 0
    axis: str = "lat"

    @property
    def spec(self) -> ModelSpec:
        return self.network.spec

    def forward(self, windows) -> np.ndarray:
        return self.network.forward(windows)


def bptt_gradients(network: Network, windows, targets, loss_kind="mse", truncate=None, context=""):
    """Exact batch-mean loss gradient; raises if anything non-finite shows up."""
    if len(windows) == 0:
        raise ValueError("empty batch")
    value, grads = network.loss_and_grads(windows, targets, loss_kind, truncate)
    if not np.isfinite(value) or not all(np.all(np.isfinite(g)) for g in grads.values()):
        where = f" ({context})" if context else ""
        raise TrainingError(f"non-finite loss or gradient{where}")
    return value, grads


def dataset_loss(network: Network, ds: WindowedDataset, loss_kind="mse", chunk: int = 256) -> float:
    pred = network.predict(ds.inputs, chunk)
    return loss(pred, ds.targets, loss_kind)


def train(
    spec: ModelSpec,
    train_ds: WindowedDataset,
    val_ds: WindowedDataset,
    config: TrainConfig | None = None,
    rng: Rng | None = None,
    scaler: Scaler | None = None,
    axis: str = "lat",
    on_epoch=None,
) -> TrainedModel:
    """Fit ``spec`` on ``train_ds``; keep the epoch with the lowest validation loss.

    Initialisation and per-epoch shuffling both draw from ``rng`` (default:
    seeded from ``spec.seed``), so a run is fully determined by its inputs.
    """
    config = config or TrainConfig()
    config.validate()
    for name, ds in (("training", train_ds), ("validation", val_ds)):
        if len(ds) == 0:
            raise ValueError(f"{name} dataset is empty")
        if ds.input_horizon != spec.input_horizon or ds.prediction_horizon != spec.prediction_horizon:
            raise ValueError(
                f"{name} windows are {ds.input_horizon}->{ds.prediction_horizon}, "
                f"model expects {spec.input_horizon}->{spec.prediction_horizon}"
            )
    rng = rng or Rng(spec.seed)
    net = Network.initialise(spec, rng)
    state = AdamState.zeros_like(net.params, lr=config.lr)

    n = len(train_ds)
    history: list[tuple[float, float]] = []
    best_val = np.inf
    best_epoch = 0
    best_params = {k: v.copy() for k, v in net.params.items()}

    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for b, start in enumerate(range(0, n, config.batch_size)):
            idx = order[start:start + config.batch_size]
            value, grads = bptt_gradients(
                net, train_ds.inputs[idx], train_ds.targets[idx], config.loss, config.truncate,
                context=f"epoch {epoch + 1}, batch {b + 1}",
            )
            grads, _ = clip_by_global_norm(grads, config.clip_norm)
            net.params, state = adam_step(net.params, grads, state)
            total += value * len(idx)
        train_loss = total / n
        val_loss = dataset_loss(net, val_ds, config.loss)
        if not np.isfinite(val_loss):
            raise TrainingError(f"non-finite validation loss at epoch {epoch + 1}")
        history.append((train_loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_params = {k: v.copy() for k, v in net.params.items()}
        log.info("epoch %d/%d train=%.3e val=%.3e", epoch + 1, config.epochs, train_loss, val_loss)
        if on_epoch is not None:
            on_epoch(epoch, train_loss, val_loss)

    return TrainedModel(Network(spec, best_params), scaler, history, best_epoch, axis)
