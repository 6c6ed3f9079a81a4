"""Modified backward passes used by attribution methods.

Three rules share the plumbing of :func:`faithlab.graph.backward` but change
what flows through each layer:

``guided-relu``
    Plain gradient, except every ReLU also zeroes *negative* incoming
    gradients on the way down.

``deeplift-rescale``
    Propagates finite-difference multipliers between the actual trace and a
    reference trace. The returned array is the input contribution map
    ``(x - x_ref) * multiplier``, which is exact for affine stacks and
    preserves the summation-to-delta property through ReLUs. Softmax is
    treated coordinate-wise, like any other nonlinearity under this rule.

``lrp-epsilon``
    Relevance propagation with an epsilon stabilizer. Relevance entering a
    layer is split proportionally to each input's share of the layer's
    pre-activation; bias terms absorb their share, so strict conservation
    holds on bias-free stacks only. ReLU and softmax pass relevance through
    unchanged (seed at the logits for softmax networks).
"""

from __future__ import annotations

import numpy as np

from faithlab import kernels
from faithlab.errors import ConfigError, ShapeMismatch
from faithlab.graph import ActivationTrace, NetGraph, _as_batch, _layer_input_grad

GUIDED_RELU = "guided-relu"
DEEPLIFT_RESCALE = "deeplift-rescale"
LRP_EPSILON = "lrp-epsilon"

RULES = (GUIDED_RELU, DEEPLIFT_RESCALE, LRP_EPSILON)

# below this pre-activation delta the rescale rule falls back to the gradient
_RESCALE_TINY = 1e-10


def _stabilized(z, epsilon):
    return z + epsilon * np.where(z >= 0.0, 1.0, -1.0)


def _guided(net, trace, g):
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        if layer.kind == "relu":
            g = g * (trace.inputs[k] > 0.0) * (g > 0.0)
        else:
            g = _layer_input_grad(
                layer, trace.inputs[k], trace.outputs[k],
                g, trace.inputs[k].shape,
            )
    return g


def _rescale_ratio(dx, dy, x):
    ratio = np.where(np.abs(dx) > _RESCALE_TINY, dy / np.where(dx == 0, 1.0, dx), 0.0)
    fallback = (x > 0.0).astype(np.float64)
    return np.where(np.abs(dx) > _RESCALE_TINY, ratio, fallback)


def _deeplift(net, trace, ref, m):
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        if layer.kind == "relu":
            dx = trace.inputs[k] - ref.inputs[k]
            dy = trace.outputs[k] - ref.outputs[k]
            m = m * _rescale_ratio(dx, dy, trace.inputs[k])
        elif layer.kind == "softmax":
            dx = trace.inputs[k] - ref.inputs[k]
            dy = trace.outputs[k] - ref.outputs[k]
            y = trace.outputs[k]
            grad_diag = y * (1.0 - y)
            ratio = np.where(
                np.abs(dx) > _RESCALE_TINY, dy / np.where(dx == 0, 1.0, dx), grad_diag
            )
            m = m * ratio
        else:
            m = _layer_input_grad(
                layer, trace.inputs[k], trace.outputs[k], m, trace.inputs[k].shape
            )
    return m


def _lrp(net, trace, r, epsilon):
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        x = trace.inputs[k]
        z = trace.outputs[k]
        if layer.kind in ("relu", "softmax"):
            pass
        elif layer.kind == "flatten":
            r = r.reshape(x.shape)
        elif layer.kind == "linear":
            s = r / _stabilized(z, epsilon)
            r = x * kernels.linear_input_grad(s, layer.weight)
        elif layer.kind == "conv":
            s = r / _stabilized(z, epsilon)
            r = x * kernels.conv2d_input_grad(
                s, layer.weight, layer.stride, x.shape[2:]
            )
        elif layer.kind == "add":
            half = x.shape[1] // 2
            s = r / _stabilized(z, epsilon)
            r = np.concatenate([x[:, :half] * s, x[:, half:] * s], axis=1)
        else:
            raise AssertionError(layer.kind)
    return r


def modified_backward(
    net: NetGraph,
    trace: ActivationTrace,
    seed,
    rule: str,
    reference_trace: ActivationTrace = None,
    epsilon: float = 1e-9,
):
    """Backward pass under an attribution rule; see module docstring.

    ``deeplift-rescale`` requires ``reference_trace`` (a forward trace of
    the baseline input); the other rules ignore it.
    """
    if rule not in RULES:
        raise ConfigError(f"unknown backward rule {rule!r}")
    if len(trace) != len(net.layers):
        raise ShapeMismatch("trace does not match this net")
    g, seed_batched = _as_batch(seed, net.output_shape, "seed")
    n_batch = trace.inputs[0].shape[0]
    if not seed_batched and n_batch != 1:
        g = np.broadcast_to(g, (n_batch,) + g.shape[1:]).copy()

    if rule == GUIDED_RELU:
        out = _guided(net, trace, g)
    elif rule == DEEPLIFT_RESCALE:
        if reference_trace is None:
            raise ConfigError("deeplift-rescale requires a reference_trace")
        if len(reference_trace) != len(net.layers):
            raise ShapeMismatch("reference trace does not match this net")
        m = _deeplift(net, trace, reference_trace, g)
        out = (trace.inputs[0] - reference_trace.inputs[0]) * m
    else:
        out = _lrp(net, trace, g, epsilon)
    return out if trace.batched else out[0]
