"""The four recurrent architectures, their losses and analytic gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..numerics import ACTIVATIONS, Rng
from .lstm import layer_backward, layer_forward

KINDS = ("vanilla", "stacked", "bidirectional", "encoder_decoder")
KIND_ALIASES = {"encdec": "encoder_decoder", "encoder-decoder": "encoder_decoder"}

# Neuron counts that gave the lowest error per kind and axis.
DEFAULT_UNITS = {
    ("vanilla", "lat"): (30,),
    ("vanilla", "lon"): (50,),
    ("stacked", "lat"): (16, 8),
    ("stacked", "lon"): (32, 8),
    ("bidirectional", "lat"): (32,),
    ("bidirectional", "lon"): (32,),
    ("encoder_decoder", "lat"): (32, 8),
    ("encoder_decoder", "lon"): (32, 8),
}


def canonical_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {', '.join(KINDS)}")
    return kind


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    layer_units: tuple[int, ...]
    input_horizon: int = 300
    prediction_horizon: int = 1
    cell_activation: str = "relu"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        object.__setattr__(self, "layer_units", tuple(int(u) for u in self.layer_units))
        n = len(self.layer_units)
        expected = {"vanilla": n == 1, "bidirectional": n == 1, "stacked": n >= 2, "encoder_decoder": n == 2}
        if not expected[self.kind]:
            raise ValueError(f"{self.kind} model cannot have {n} layer(s): {self.layer_units}")
        if any(u < 1 for u in self.layer_units):
            raise ValueError("layer sizes must be positive")
        if self.input_horizon < 1:
            raise ValueError("input_horizon must be positive")
        if self.kind != "encoder_decoder" and self.prediction_horizon != 1:
            raise ValueError(f"{self.kind} is many-to-one; prediction_horizon must be 1")
        if self.prediction_horizon < 1:
            raise ValueError("prediction_horizon must be positive")
        if self.cell_activation not in ACTIVATIONS:
            raise ValueError(f"unknown cell activation {self.cell_activation!r}")

    @property
    def many_to_one(self) -> bool:
        return self.kind != "encoder_decoder"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "layer_units": list(self.layer_units),
            "input_horizon": self.input_horizon,
            "prediction_horizon": self.prediction_horizon,
            "cell_activation": self.cell_activation,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            kind=d["kind"],
            layer_units=tuple(d["layer_units"]),
            input_horizon=int(d["input_horizon"]),
            prediction_horizon=int(d["prediction_horizon"]),
            cell_activation=d["cell_activation"],
            seed=int(d["seed"]),
        )


def param_shapes(spec: ModelSpec) -> dict[str, tuple[int, ...]]:
    """Ordered parameter names and shapes; this order is also the RNG draw order."""
    shapes: dict[str, tuple[int, ...]] = {}

    def lstm(prefix, d_in, h):
        shapes[f"{prefix}.W"] = (4 * h, d_in)
        shapes[f"{prefix}.U"] = (4 * h, h)
        shapes[f"{prefix}.b"] = (4 * h,)

    units = spec.layer_units
    if spec.kind in ("vanilla", "stacked"):
        d_in = 1
        for k, h in enumerate(units):
            lstm(f"lstm{k}", d_in, h)
            d_in = h
        head_in = units[-1]
    elif spec.kind == "bidirectional":
        lstm("fwd", 1, units[0])
        lstm("bwd", 1, units[0])
        head_in = 2 * units[0]
    else:
        h_enc, h_dec = units
        lstm("enc", 1, h_enc)
        shapes["proj.W"] = (h_dec, h_enc)
        shapes["proj.b"] = (h_dec,)
        lstm("dec", h_dec, h_dec)
        head_in = h_dec
    shapes["dense.W"] = (1, head_in)
    shapes["dense.b"] = (1,)
    return shapes


def init_weights(spec: ModelSpec, rng: Rng) -> dict[str, np.ndarray]:
    """Glorot-uniform matrices; zero biases except the forget-gate block at 1.0."""
    params = {}
    for name, shape in param_shapes(spec).items():
        if len(shape) == 2:
            bound = glorot_bound(shape)
            params[name] = rng.uniform(-bound, bound, size=shape)
        else:
            b = np.zeros(shape)
            if name.endswith(".b") and not name.startswith(("dense", "proj")):
                h = shape[0] // 4
                b[:h] = 1.0
            params[name] = b
    return params


def glorot_bound(shape) -> float:
    rows, cols = shape
    return math.sqrt(6.0 / (cols + rows))


def _stack_forward(params, prefixes, X, act, keep_cache):
    caches = []
    seq = X
    for p in prefixes:
        seq, cache = layer_forward(params[p + ".W"], params[p + ".U"], params[p + ".b"], seq, act, keep_cache)
        caches.append(cache)
    return seq, caches


def _stack_backward(params, prefixes, caches, dH, grads, truncate):
    for p, cache in zip(reversed(prefixes), reversed(caches)):
        dH, dW, dU, db = layer_backward(params[p + ".W"], params[p + ".U"], cache, dH, truncate)
        grads[p + ".W"] += dW
        grads[p + ".U"] += dU
        grads[p + ".b"] += db
    return dH


@dataclass
class Network:
    """A model spec plus its weights. ``params`` is an ordered name -> array dict."""

    spec: ModelSpec
    params: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def initialise(cls, spec: ModelSpec, rng: Rng | None = None) -> "Network":
        return cls(spec, init_weights(spec, rng or Rng(spec.seed)))

    def copy(self) -> "Network":
        return Network(self.spec, {k: v.copy() for k, v in self.params.items()})

    def _prefixes(self):
        if self.spec.kind in ("vanilla", "stacked"):
            return [f"lstm{k}" for k in range(len(self.spec.layer_units))]
        raise AssertionError

    def _check_windows(self, windows):
        X = np.asarray(windows, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.spec.input_horizon:
            raise ValueError(f"expected windows of length {self.spec.input_horizon}, got shape {X.shape}")
        return X[:, :, None]

    def _run(self, X, keep_cache):
        p = self.params
        act = self.spec.cell_activation
        kind = self.spec.kind
        if kind in ("vanilla", "stacked"):
            seq, caches = _stack_forward(p, self._prefixes(), X, act, keep_cache)
            feat = seq[:, -1]
            y = feat @ p["dense.W"].T + p["dense.b"]
            return y, (caches, feat)
        if kind == "bidirectional":
            hf, cf = layer_forward(p["fwd.W"], p["fwd.U"], p["fwd.b"], X, act, keep_cache)
            hb, cb = layer_forward(p["bwd.W"], p["bwd.U"], p["bwd.b"], X[:, ::-1], act, keep_cache)
            feat = np.concatenate([hf[:, -1], hb[:, -1]], axis=1)
            y = feat @ p["dense.W"].T + p["dense.b"]
            return y, (cf, cb, feat)
        he, ce = layer_forward(p["enc.W"], p["enc.U"], p["enc.b"], X, act, keep_cache)
        code = he[:, -1]
        z = code @ p["proj.W"].T + p["proj.b"]
        M = self.spec.prediction_horizon
        dec_in = np.repeat(z[:, None, :], M, axis=1)
        hd, cd = layer_forward(p["dec.W"], p["dec.U"], p["dec.b"], dec_in, act, keep_cache)
        y = (hd @ p["dense.W"].T)[..., 0] + p["dense.b"]
        return y, (ce, code, cd, hd)

    def forward(self, windows) -> np.ndarray:
        """Predictions of shape (B, prediction_horizon) for windows of shape (B, L)."""
        y, _ = self._run(self._check_windows(windows), keep_cache=False)
        return y

    def predict(self, windows, chunk: int = 256) -> np.ndarray:
        X = np.asarray(windows, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        out = [self.forward(X[i:i + chunk]) for i in range(0, len(X), chunk)]
        return np.concatenate(out, axis=0) if out else np.empty((0, self.spec.prediction_horizon))

    def _backward(self, X, cache, dy, truncate):
        p = self.params
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        kind = self.spec.kind
        B, T, _ = X.shape
        if kind in ("vanilla", "stacked"):
            caches, feat = cache
            grads["dense.W"] += dy.T @ feat
            grads["dense.b"] += dy.sum(axis=0)
            H = feat.shape[1]
            dH = np.zeros((B, T, H))
            dH[:, -1] = dy @ p["dense.W"]
            _stack_backward(p, self._prefixes(), caches, dH, grads, truncate)
        elif kind == "bidirectional":
            cf, cb, feat = cache
            grads["dense.W"] += dy.T @ feat
            grads["dense.b"] += dy.sum(axis=0)
            dfeat = dy @ p["dense.W"]
            H = feat.shape[1] // 2
            for name, c, d in (("fwd", cf, dfeat[:, :H]), ("bwd", cb, dfeat[:, H:])):
                dH = np.zeros((B, T, H))
                dH[:, -1] = d
                _stack_backward(p, [name], [c], dH, grads, truncate)
        else:
            ce, code, cd, hd = cache
            grads["dense.W"] += np.einsum("bm,bmh->h", dy, hd)[None, :]
            grads["dense.b"] += dy.sum()
            dHd = dy[..., None] * p["dense.W"][0]
            d_in = _stack_backward(p, ["dec"], [cd], dHd, grads, None)
            dz = d_in.sum(axis=1)
            grads["proj.W"] += dz.T @ code
            grads["proj.b"] += dz.sum(axis=0)
            dH = np.zeros((B, T, code.shape[1]))
            dH[:, -1] = dz @ p["proj.W"]
            _stack_backward(p, ["enc"], [ce], dH, grads, truncate)
        return grads

    def loss_and_grads(self, windows, targets, loss_kind: str = "mse", truncate: int | None = None):
        """Batch-mean loss and its exact gradient for every parameter."""
        X = self._check_windows(windows)
        Y = np.asarray(targets, dtype=np.float64).reshape(X.shape[0], -1)
        if Y.shape[1] != self.spec.prediction_horizon:
            raise ValueError(f"targets must have {self.spec.prediction_horizon} step(s), got {Y.shape[1]}")
        pred, cache = self._run(X, keep_cache=True)
        value, dy = loss_with_grad(pred, Y, loss_kind)
        grads = self._backward(X, cache, dy, truncate)
        return value, grads


def loss(pred, target, kind: str = "mse") -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"prediction shape {pred.shape} != target shape {target.shape}")
    if pred.size == 0:
        raise ValueError("empty batch")
    diff = pred - target
    if kind == "mse":
        return float(np.mean(diff * diff))
    if kind == "mae":
        return float(np.mean(np.abs(diff)))
    raise ValueError(f"unknown loss {kind!r}")


def loss_with_grad(pred, target, kind: str = "mse"):
    value = loss(pred, target, kind)
    diff = pred - target
    if kind == "mse":
        grad = 2.0 * diff / diff.size
    else:
        grad = np.sign(diff) / diff.size
    return value, grad
