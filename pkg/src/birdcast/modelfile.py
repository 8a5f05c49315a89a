"""Versioned JSON persistence for trained models.

Layout::

    {"format_version": 1, "seed": ..., "config": {...},
     "models": {"lat": {"spec": ..., "scaler": ..., "weights": {name: {"shape": [...], "data": [...]}},
                        "history": [[train, val], ...], "best_epoch": k}, "lon": {...}}}

Floats are written with Python's shortest round-trip repr, so a save/load
cycle reproduces every weight bit for bit.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .data import Scaler
from .nn.models import ModelSpec, Network, param_shapes
from .nn.train import TrainedModel

FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


def _model_to_dict(m: TrainedModel) -> dict:
    return {
        "spec": m.spec.to_dict(),
        "scaler": None if m.scaler is None else {"min": m.scaler.min, "max": m.scaler.max},
        "weights": {
            name: {"shape": list(w.shape), "data": [float(x) for x in w.ravel()]}
            for name, w in m.network.params.items()
        },
        "history": [[float(a), float(b)] for a, b in m.history],
        "best_epoch": int(m.best_epoch),
    }


def _model_from_dict(axis: str, d: dict) -> TrainedModel:
    spec = ModelSpec.from_dict(d["spec"])
    expected = param_shapes(spec)
    weights = d["weights"]
    if set(weights) != set(expected):
        raise ModelFileError(f"{axis}: weight names do not match a {spec.kind} model")
    params = {}
    for name, shape in expected.items():
        entry = weights[name]
        if tuple(entry["shape"]) != shape:
            raise ModelFileError(f"{axis}: {name} has shape {entry['shape']}, expected {list(shape)}")
        data = np.asarray(entry["data"], dtype=np.float64)
        if data.size != int(np.prod(shape)):
            raise ModelFileError(f"{axis}: {name} holds {data.size} values, shape needs {int(np.prod(shape))}")
        params[name] = data.reshape(shape)
    sc = d.get("scaler")
    scaler = None if sc is None else Scaler(float(sc["min"]), float(sc["max"]))
    history = [(float(a), float(b)) for a, b in d.get("history", [])]
    return TrainedModel(Network(spec, params), scaler, history, int(d.get("best_epoch", 0)), axis)


def dumps(models: dict[str, TrainedModel], config: dict | None = None, seed: int = 0) -> str:
    payload = {
        "format_version": FORMAT_VERSION,
        "seed": int(seed),
        "config": config or {},
        "models": {axis: _model_to_dict(m) for axis, m in models.items()},
    }
    return json.dumps(payload, separators=(",", ":")) + "\n"


def save_model(path, models: dict[str, TrainedModel], config: dict | None = None, seed: int = 0) -> None:
    """Write atomically: readers never observe a half-written file."""
    text = dumps(models, config, seed)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def loads(text: str):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"model file is not valid JSON (truncated?): {exc}") from None
    if not isinstance(payload, dict):
        raise ModelFileError("model file must hold a JSON object")
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFileError(f"unsupported model format_version {version!r} (expected {FORMAT_VERSION})")
    try:
        models = {axis: _model_from_dict(axis, d) for axis, d in payload["models"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"malformed model file: {exc!r}") from None
    if not models:
        raise ModelFileError("model file holds no models")
    return models, payload.get("config", {}), int(payload.get("seed", 0))


def load_model(path):
    """Returns ``(models_by_axis, config_dict, seed)``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from None
    return loads(text)
