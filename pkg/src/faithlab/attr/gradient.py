"""Gradient- and propagation-based attribution methods.

Multi-class networks are attributed at the post-softmax output by default
(matching how such methods are usually applied to classifiers); occlusion,
GradCAM and LRP instead read the pre-softmax logit, which is the standard
convention for those methods. Scalar-output networks ignore the tap.
"""

import numpy as np

from faithlab.attr.common import (
    POST_SOFTMAX,
    PRE_SOFTMAX,
    channel_sum,
    onehot_seed,
    output_net,
    resolve_target,
)
from faithlab.attr.imageops import bilinear_upsample
from faithlab.attr.maps import AttributionMap, BaselineSpec, fingerprint
from faithlab.errors import ConfigError
from faithlab.forge.nets import default_gradcam_tap
from faithlab.graph import backward, backward_to, forward
from faithlab.rules import DEEPLIFT_RESCALE, GUIDED_RELU, LRP_EPSILON, modified_backward

IG_DEFAULT_STEPS = 64
_IG_CHUNK = 32


def saliency(net, sample, target=None, output_tap=POST_SOFTMAX) -> AttributionMap:
    """Channel-summed absolute input gradient of the target output."""
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    _, trace = forward(sub, sample.image)
    grad = backward(sub, trace, onehot_seed(sub, tgt))
    return AttributionMap(
        values=channel_sum(grad, absolute=True),
        method="saliency",
        fingerprint=fingerprint("saliency", {"output_tap": output_tap}),
        target=tgt,
        signed=False,
    )


def guided_backprop(net, sample, target=None, output_tap=POST_SOFTMAX) -> AttributionMap:
    """Gradient with negative flows clipped at every ReLU; absolute values."""
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    _, trace = forward(sub, sample.image)
    grad = modified_backward(sub, trace, onehot_seed(sub, tgt), GUIDED_RELU)
    return AttributionMap(
        values=channel_sum(grad, absolute=True),
        method="guided-backprop",
        fingerprint=fingerprint("guided-backprop", {"output_tap": output_tap}),
        target=tgt,
        signed=False,
    )


def _path_eval(sub, base, diff, seed, ts):
    """Forward value and directional derivative of the target at path nodes."""
    ys = np.empty(len(ts))
    dys = np.empty(len(ts))
    for lo in range(0, len(ts), _IG_CHUNK):
        hi = min(lo + _IG_CHUNK, len(ts))
        batch = base[None] + ts[lo:hi, None, None, None] * diff[None]
        out, trace = forward(sub, batch)
        grads = backward(sub, trace, seed)
        ys[lo:hi] = (out.reshape(hi - lo, -1) * seed.reshape(1, -1)).sum(axis=1)
        dys[lo:hi] = np.einsum("bchw,chw->b", grads, diff)
    return ys, dys


def _adaptive_nodes(sub, base, diff, seed, budget):
    """Node placement by interval bisection.

    The designed nets are piecewise linear, so the path derivative is
    piecewise constant and the exact integral over any interval is known
    from the endpoint values: y(b) - y(a). Intervals where the trapezoid
    estimate disagrees (or where the derivative changes) contain a kink and
    are bisected, worst first, until the evaluation budget is spent. On a
    smooth net this degrades gracefully to a near-uniform grid.
    """
    n0 = min(65, budget // 2 + 1)
    ts = np.linspace(0.0, 1.0, n0)
    ys, dys = _path_eval(sub, base, diff, seed, ts)
    scale = max(1.0, abs(ys[-1] - ys[0]))
    while len(ts) < budget:
        gaps = np.diff(ts)
        trap = 0.5 * (dys[:-1] + dys[1:]) * gaps
        mismatch = np.abs(trap - np.diff(ys))
        kinked = dys[:-1] != dys[1:]
        mismatch = np.where(kinked, np.maximum(mismatch, 1e-12 * scale), mismatch)
        mismatch[gaps <= 1e-12] = 0.0
        order = np.argsort(-mismatch)
        picks = order[: min(32, budget - len(ts))]
        picks = picks[mismatch[picks] > 1e-9 * scale]
        if len(picks) == 0:
            break
        mids = (ts[picks] + ts[picks + 1]) / 2
        my, mdy = _path_eval(sub, base, diff, seed, mids)
        keep = np.argsort(np.concatenate([ts, mids]))
        ts = np.concatenate([ts, mids])[keep]
        ys = np.concatenate([ys, my])[keep]
        dys = np.concatenate([dys, mdy])[keep]
    return ts


def integrated_gradients(
    net,
    sample,
    target=None,
    baseline: BaselineSpec = None,
    steps: int = IG_DEFAULT_STEPS,
    quadrature: str = "adaptive",
    output_tap=POST_SOFTMAX,
) -> AttributionMap:
    """Path integral of gradients from the baseline image to the input,
    times (x - baseline), channel-summed.

    ``steps`` is the gradient-evaluation budget. ``quadrature`` selects the
    node placement: ``adaptive`` (default) bisects toward the gate
    transitions of piecewise-linear nets, which a uniform rule of any
    feasible size misses entirely (their path derivative is a step function
    concentrated in a sliver near the path ends); ``trapezoid`` is the
    plain uniform rule with both endpoints.
    """
    if steps < 8:
        raise ConfigError(f"integrated gradients needs steps >= 8, got {steps}")
    if baseline is None:
        raise ConfigError("integrated gradients requires a baseline")
    if quadrature not in ("adaptive", "trapezoid"):
        raise ConfigError(f"unknown quadrature {quadrature!r}")
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    x = sample.image
    base = baseline.image(x.shape)
    diff = x - base
    seed = onehot_seed(sub, tgt)
    if quadrature == "adaptive" and np.any(diff != 0.0):
        ts = _adaptive_nodes(sub, base, diff, seed, steps)
    else:
        ts = np.linspace(0.0, 1.0, steps + 1)
    gaps = np.diff(ts)
    weights = np.zeros(len(ts))
    weights[:-1] += gaps / 2
    weights[1:] += gaps / 2
    total = np.zeros_like(x)
    for lo in range(0, len(ts), _IG_CHUNK):
        hi = min(lo + _IG_CHUNK, len(ts))
        batch = base[None] + ts[lo:hi, None, None, None] * diff[None]
        _, trace = forward(sub, batch)
        grads = backward(sub, trace, seed)
        total += np.einsum("b,bchw->chw", weights[lo:hi], grads)
    return AttributionMap(
        values=channel_sum(diff * total, absolute=False),
        method="integrated-gradients",
        fingerprint=fingerprint(
            "integrated-gradients",
            {
                "steps": steps,
                "quadrature": quadrature,
                "baseline": baseline.key(),
                "output_tap": output_tap,
            },
        ),
        target=tgt,
        signed=True,
    )


def gradcam(net, sample, target=None, tap: str = None) -> AttributionMap:
    """Channel-weighted tap activations (weights = pooled logit gradients),
    ReLU-clipped and bilinearly upsampled to the input size."""
    sub = output_net(net, PRE_SOFTMAX)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    if tap is None:
        tap = default_gradcam_tap(sub)
    tap_idx = sub.tap_index(tap)
    _, trace = forward(sub, sample.image)
    acts = trace.outputs[tap_idx][0]
    if acts.ndim != 3:
        raise ConfigError(f"gradcam tap {tap!r} has no spatial layout")
    grads = backward_to(sub, trace, onehot_seed(sub, tgt), tap_idx)
    alpha = grads.mean(axis=(1, 2))
    cam = np.maximum(np.einsum("c,chw->hw", alpha, acts), 0.0)
    h, w = sample.image.shape[1:]
    return AttributionMap(
        values=bilinear_upsample(cam, h, w),
        method="gradcam",
        fingerprint=fingerprint("gradcam", {"tap": tap}),
        target=tgt,
        signed=False,
    )


def deeplift_rescale(
    net, sample, target=None, baseline: BaselineSpec = None, output_tap=POST_SOFTMAX
) -> AttributionMap:
    """Single-reference rescale-rule contributions against a baseline trace."""
    if baseline is None:
        raise ConfigError("deeplift-rescale requires a baseline")
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    _, trace = forward(sub, sample.image)
    _, ref = forward(sub, baseline.image(sample.image.shape))
    contrib = modified_backward(
        sub, trace, onehot_seed(sub, tgt), DEEPLIFT_RESCALE, reference_trace=ref
    )
    return AttributionMap(
        values=channel_sum(contrib, absolute=False),
        method="deeplift-rescale",
        fingerprint=fingerprint(
            "deeplift-rescale",
            {"baseline": baseline.key(), "output_tap": output_tap},
        ),
        target=tgt,
        signed=True,
    )


def lrp_epsilon(net, sample, target=None, epsilon: float = 1e-9) -> AttributionMap:
    """Epsilon-stabilized relevance propagation from the target logit."""
    if epsilon <= 0:
        raise ConfigError(f"lrp epsilon must be > 0, got {epsilon}")
    sub = output_net(net, PRE_SOFTMAX)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    y, trace = forward(sub, sample.image)
    seed = onehot_seed(sub, tgt)
    seed *= y if tgt == "scalar" else y[int(tgt)]
    rel = modified_backward(sub, trace, seed, LRP_EPSILON, epsilon=epsilon)
    return AttributionMap(
        values=channel_sum(rel, absolute=False),
        method="lrp-epsilon",
        fingerprint=fingerprint("lrp-epsilon", {"epsilon": epsilon}),
        target=tgt,
        signed=True,
    )
