"""Shared oracles for the test suite."""

import numpy as np

from birdcast.nn.models import ModelSpec, Network
from birdcast.numerics import Rng

TOY_UNITS = {"vanilla": (2,), "stacked": (2, 2), "bidirectional": (2,), "encoder_decoder": (2, 2)}


def toy_network(kind, act="tanh", seed=0, L=5, M=3):
    """2-unit network with every parameter (biases included) drawn at random."""
    spec = ModelSpec(kind, TOY_UNITS[kind], L, M if kind == "encoder_decoder" else 1, act, seed)
    net = Network.initialise(spec, Rng(seed))
    rng = np.random.default_rng(seed + 1000)
    for k in net.params:
        net.params[k] = rng.uniform(-0.8, 0.8, net.params[k].shape)
    return net


def toy_batch(net, batch=3, seed=0):
    rng = np.random.default_rng(seed + 2000)
    X = rng.uniform(0, 1, (batch, net.spec.input_horizon))
    Y = rng.uniform(0, 1, (batch, net.spec.prediction_horizon))
    return X, Y


def finite_difference_grads(net, X, Y, loss_kind="mse", eps=1e-5):
    """Central differences of the batch loss, one parameter entry at a time."""
    out = {}
    for name, w in net.params.items():
        g = np.zeros_like(w)
        flat = w.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up = net.loss_and_grads(X, Y, loss_kind)[0]
            flat[j] = orig - eps
            down = net.loss_and_grads(X, Y, loss_kind)[0]
            flat[j] = orig
            g.reshape(-1)[j] = (up - down) / (2 * eps)
        out[name] = g
    return out


def max_relative_error(analytic, numeric, floor=1e-7):
    worst = 0.0
    for k in analytic:
        a, n = analytic[k], numeric[k]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
