from .lstm import LstmParams, layer_backward, layer_forward, lstm_cell_step
from .models import DEFAULT_UNITS, KINDS, ModelSpec, Network, canonical_kind, init_weights, loss, param_shapes
from .optim import AdamState, adam_step, clip_by_global_norm
from .train import TrainConfig, TrainedModel, TrainingError, bptt_gradients, dataset_loss, train

__all__ = [
    "AdamState",
    "DEFAULT_UNITS",
    "KINDS",
    "LstmParams",
    "ModelSpec",
    "Network",
    "TrainConfig",
    "TrainedModel",
    "TrainingError",
    "adam_step",
    "bptt_gradients",
    "canonical_kind",
    "clip_by_global_norm",
    "dataset_loss",
    "init_weights",
    "layer_backward",
    "layer_forward",
    "loss",
    "lstm_cell_step",
    "param_shapes",
    "train",
]
