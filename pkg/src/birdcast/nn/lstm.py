"""LSTM cell and full-sequence layer with exact backpropagation through time.

Gate blocks are stacked along the first weight axis in the order
forget, input, candidate, output::

    W: (4H, D)   U: (4H, H)   b: (4H,)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import activation, sigmoid, sigmoid_into

GATES = ("forget", "input", "candidate", "output")


@dataclass
class LstmParams:
    W: np.ndarray
    U: np.ndarray
    b: np.ndarray
    cell_activation: str = "tanh"

    @property
    def units(self) -> int:
        return self.U.shape[1]

    @property
    def input_dim(self) -> int:
        return self.W.shape[1]

    def gate(self, name: str):
        """Per-gate ``(W_g, U_g, b_g)`` views."""
        k = GATES.index(name)
        H = self.units
        sl = slice(k * H, (k + 1) * H)
        return self.W[sl], self.U[sl], self.b[sl]

    def check(self):
        H = self.units
        if self.W.shape[0] != 4 * H or self.U.shape != (4 * H, H) or self.b.shape != (4 * H,):
            raise ValueError(f"inconsistent LSTM shapes W{self.W.shape} U{self.U.shape} b{self.b.shape}")


def lstm_cell_step(x_t, h_prev, c_prev, p: LstmParams):
    """One cell update; returns ``(h_t, c_t)``. Accepts single vectors or batches."""
    p.check()
    x_t = np.atleast_1d(np.asarray(x_t, dtype=np.float64))
    h_prev = np.atleast_1d(np.asarray(h_prev, dtype=np.float64))
    c_prev = np.atleast_1d(np.asarray(c_prev, dtype=np.float64))
    if x_t.shape[-1] != p.input_dim or h_prev.shape[-1] != p.units or c_prev.shape[-1] != p.units:
        raise ValueError(
            f"cell expects x[{p.input_dim}], h[{p.units}], c[{p.units}]; "
            f"got {x_t.shape}, {h_prev.shape}, {c_prev.shape}"
        )
    act, _ = activation(p.cell_activation)
    H = p.units
    z = x_t @ p.W.T + h_prev @ p.U.T + p.b
    f = sigmoid(z[..., :H])
    i = sigmoid(z[..., H:2 * H])
    g = act(z[..., 2 * H:3 * H])
    o = sigmoid(z[..., 3 * H:])
    c = f * c_prev + i * g
    h = o * act(c)
    return h, c


class LayerCache:
    """Time-major activations saved by the forward pass."""

    __slots__ = ("X", "hs", "cs", "gates", "zg", "ac", "act")

    def __init__(self, X, hs, cs, gates, zg, ac, act):
        self.X, self.hs, self.cs, self.gates, self.zg, self.ac, self.act = X, hs, cs, gates, zg, ac, act


def layer_forward(W, U, b, X, act_name: str, keep_cache: bool = True):
    """Run a layer over ``X`` of shape (B, T, D) from zero state.

    Returns the hidden sequence (B, T, H) and, when ``keep_cache``, the cache
    needed by :func:`layer_backward`. Work arrays are time-major so each step
    touches contiguous memory.
    """
    B, T, D = X.shape
    H = U.shape[1]
    act, _ = activation(act_name)
    Xt = np.ascontiguousarray(X.transpose(1, 0, 2))
    xw = Xt @ W.T + b  # (T, B, 4H)
    UT = U.T
    hs = np.zeros((T + 1, B, H))
    cs = np.zeros((T + 1, B, H))
    gates = np.empty((T, B, 4 * H)) if keep_cache else np.empty((1, B, 4 * H))
    zg = np.empty((T, B, H)) if keep_cache else None
    ac = np.empty((T, B, H)) if keep_cache else None
    cand = slice(2 * H, 3 * H)
    for t in range(T):
        z = xw[t]
        z += hs[t] @ UT
        gt = gates[t] if keep_cache else gates[0]
        sigmoid_into(z, gt)  # all four blocks; the candidate block is overwritten next
        gt[:, cand] = act(z[:, cand])
        c = cs[t + 1]
        np.multiply(gt[:, :H], cs[t], out=c)
        c += gt[:, H:2 * H] * gt[:, cand]
        a_c = act(c)
        np.multiply(gt[:, 3 * H:], a_c, out=hs[t + 1])
        if keep_cache:
            zg[t] = z[:, cand]
            ac[t] = a_c
    out = hs[1:].transpose(1, 0, 2)
    if not keep_cache:
        return out, None
    return out, LayerCache(Xt, hs, cs, gates, zg, ac, act_name)


def layer_backward(W, U, cache: LayerCache, dH, truncate: int | None = None):
    """Gradients of a layer given dL/dh_t for every step (dH, shape (B, T, H)).

    Returns ``(dX, dW, dU, db)``. ``truncate`` limits the unroll to the last
    ``truncate`` steps; leave it ``None`` for the exact gradient.
    """
    Xt, hs, cs, gates = cache.X, cache.hs, cache.cs, cache.gates
    T, B, D = Xt.shape
    H = U.shape[1]
    _, dact = activation(cache.act)
    dHt = dH.transpose(1, 0, 2)
    dz_all = np.zeros((T, B, 4 * H))
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    stop = -1 if truncate is None else max(T - truncate, 0) - 1
    for t in range(T - 1, stop, -1):
        gt = gates[t]
        f = gt[:, :H]
        i = gt[:, H:2 * H]
        g = gt[:, 2 * H:3 * H]
        o = gt[:, 3 * H:]
        a_c = cache.ac[t]
        dh = dHt[t] + dh_next
        dc = dc_next + dh * o * dact(cs[t + 1], a_c)
        dz = dz_all[t]
        dz[:, :H] = dc * cs[t]
        dz[:, H:2 * H] = dc * g
        dz[:, 3 * H:] = dh * a_c
        # sigmoid blocks share the a(1-a) factor
        dz *= gt * (1.0 - gt)
        dz[:, 2 * H:3 * H] = dc * i * dact(cache.zg[t], g)
        dh_next = dz @ U
        dc_next = dc * f
    flat = dz_all.reshape(-1, 4 * H)
    dW = flat.T @ Xt.reshape(-1, D)
    dU = flat.T @ hs[:-1].reshape(-1, H)
    db = flat.sum(axis=0)
    dX = (dz_all @ W).transpose(1, 0, 2)
    return dX, dW, dU, db
