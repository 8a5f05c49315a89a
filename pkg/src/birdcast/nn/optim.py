from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step_count: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params, **hyper) -> "AdamState":
        return cls(
            m={k: np.zeros_like(v) for k, v in params.items()},
            v={k: np.zeros_like(v) for k, v in params.items()},
            **hyper,
        )


def adam_step(params, grads, state: AdamState):
    """Bias-corrected Adam update. Returns new ``(params, state)``; inputs are untouched."""
    if set(params) != set(grads):
        raise ValueError("parameter and gradient names differ")
    if not state.m:
        state = AdamState.zeros_like(params, lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps)
    step = state.step_count + 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** step
    c2 = 1.0 - b2 ** step
    new_params, new_m, new_v = {}, {}, {}
    for k, w in params.items():
        g = np.asarray(grads[k], dtype=np.float64)
        if g.shape != w.shape:
            raise ValueError(f"gradient for {k} has shape {g.shape}, weight has {w.shape}")
        m = b1 * state.m[k] + (1.0 - b1) * g
        v = b2 * state.v[k] + (1.0 - b2) * g * g
        new_params[k] = w - state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
        new_m[k] = m
        new_v[k] = v
    return new_params, AdamState(new_m, new_v, step, state.lr, b1, b2, state.eps)


def global_norm(grads) -> float:
    return math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))


def clip_by_global_norm(grads, max_norm: float):
    norm = global_norm(grads)
    if max_norm is None or norm <= max_norm:
        return grads, norm
    s = max_norm / norm
    return {k: g * s for k, g in grads.items()}, norm
