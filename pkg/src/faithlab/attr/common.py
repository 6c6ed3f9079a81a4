"""Shared plumbing for attribution methods: output taps, seeds, reductions.

Methods never see ground-truth masks; their inputs are (net, image, target,
hyper-parameters) only.
"""

import numpy as np

from faithlab.errors import ConfigError
from faithlab.graph import NetGraph, forward

PRE_SOFTMAX = "pre-softmax"
POST_SOFTMAX = "post-softmax"
SCALAR_TARGET = "scalar"


def output_net(net: NetGraph, tap: str) -> NetGraph:
    """View of ``net`` ending at the requested output tap.

    ``post-softmax`` is the full net; ``pre-softmax`` strips a trailing
    softmax when present (scalar-output nets are unaffected by either).
    """
    if tap not in (PRE_SOFTMAX, POST_SOFTMAX):
        raise ConfigError(f"output tap must be pre-softmax|post-softmax, got {tap!r}")
    if tap == POST_SOFTMAX or net.layers[-1].kind != "softmax":
        return net
    idx = len(net.layers) - 1
    while idx >= 0 and net.layers[idx].kind == "softmax":
        idx -= 1
    return NetGraph(
        net.layers[: idx + 1],
        input_shape=net.input_shape,
        taps={k: v for k, v in net.taps.items() if v <= idx},
    )


def resolve_target(net: NetGraph, target):
    """Class index for vector outputs, SCALAR_TARGET for scalar outputs."""
    arity = int(np.prod(net.output_shape))
    if arity == 1:
        return SCALAR_TARGET
    if target is None or not 0 <= int(target) < arity:
        raise ConfigError(f"target {target!r} invalid for output arity {arity}")
    return int(target)


def onehot_seed(net: NetGraph, target) -> np.ndarray:
    seed = np.zeros(net.output_shape)
    if target == SCALAR_TARGET:
        seed[...] = 1.0
    else:
        seed[int(target)] = 1.0
    return seed


def channel_sum(grad: np.ndarray, absolute: bool) -> np.ndarray:
    """(C, H, W) -> (H, W), absolute or signed channel reduction."""
    return np.abs(grad).sum(axis=0) if absolute else grad.sum(axis=0)


def target_value(net: NetGraph, x, target):
    y, _ = forward(net, x)
    if target == SCALAR_TARGET:
        return float(y.reshape(-1)[0])
    return float(y[int(target)])
