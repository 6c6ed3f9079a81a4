"""Perturbation-based attribution: occlusion and extremal mask optimization."""

import numpy as np

from faithlab.attr.common import (
    POST_SOFTMAX,
    PRE_SOFTMAX,
    SCALAR_TARGET,
    onehot_seed,
    output_net,
    resolve_target,
)
from faithlab.attr.imageops import gaussian_blur
from faithlab.attr.maps import AttributionMap, BaselineSpec, fingerprint
from faithlab.errors import ConfigError
from faithlab.graph import backward, forward

_OCC_CHUNK = 256


def _window_starts(extent: int, window: int, stride: int) -> list:
    starts = list(range(0, extent - window + 1, stride))
    tail = extent - window
    if starts and starts[-1] != tail:
        starts.append(tail)  # cover the ragged edge so every pixel is scored
    return starts


def occlusion(
    net,
    sample,
    target=None,
    window=(3, 5, 5),
    strides=(3, 3, 3),
    baseline: BaselineSpec = None,
    output_tap=PRE_SOFTMAX,
) -> AttributionMap:
    """Output drop when a sliding window is replaced by the baseline.

    Each pixel accumulates y(x) - y(occluded) over every window covering it
    and is normalized by its coverage count. The window must span all
    channels (per-channel windows are not used by any designed setup).
    """
    if baseline is None:
        raise ConfigError("occlusion requires a baseline")
    c, h, w = sample.image.shape
    wc, wh, ww = window
    if wc != c:
        raise ConfigError(f"occlusion window must span all {c} channels")
    if wh > h or ww > w:
        raise ConfigError(f"occlusion window {window} larger than image")
    if min(window) < 1 or min(strides) < 1:
        raise ConfigError("occlusion window and strides must be positive")
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    x = sample.image
    fill = baseline.image(x.shape)
    y0, _ = forward(sub, x)
    base_val = float(y0.reshape(-1)[0] if tgt == SCALAR_TARGET else y0[int(tgt)])

    positions = [
        (r, cc)
        for r in _window_starts(h, wh, strides[1])
        for cc in _window_starts(w, ww, strides[2])
    ]
    values = np.zeros((h, w))
    coverage = np.zeros((h, w))
    for lo in range(0, len(positions), _OCC_CHUNK):
        part = positions[lo : lo + _OCC_CHUNK]
        batch = np.repeat(x[None], len(part), axis=0)
        for b, (r, cc) in enumerate(part):
            batch[b, :, r : r + wh, cc : cc + ww] = fill[:, r : r + wh, cc : cc + ww]
        ys, _ = forward(sub, batch)
        ys = ys.reshape(len(part), -1)
        vals = ys[:, 0] if tgt == SCALAR_TARGET else ys[:, int(tgt)]
        for b, (r, cc) in enumerate(part):
            values[r : r + wh, cc : cc + ww] += base_val - vals[b]
            coverage[r : r + wh, cc : cc + ww] += 1.0
    values = np.divide(values, coverage, out=np.zeros_like(values), where=coverage > 0)
    return AttributionMap(
        values=values,
        method="occlusion",
        fingerprint=fingerprint(
            "occlusion",
            {
                "window": list(window),
                "strides": list(strides),
                "baseline": baseline.key(),
                "output_tap": output_tap,
            },
        ),
        target=tgt,
        signed=True,
    )


def extremal_perturbation(
    net,
    sample,
    target=None,
    area: float = 0.1,
    blur_sigma: float = 10.0,
    steps: int = 400,
    step_size: float = 0.05,
    penalty: float = 300.0,
    seed: int = 0,
    output_tap=PRE_SOFTMAX,
) -> AttributionMap:
    """Gradient ascent on a sigmoid-squashed mask blending the image with
    its Gaussian blur, maximizing the target output under a sorted-mask
    area penalty (the top ``area`` fraction is pushed to 1, the rest to 0).

    Classification nets maximize the target logit; scalar nets maximize
    agreement with the unperturbed output (the preservation objective),
    since a bare scalar regression value is not a confidence to maximize.
    The mask starts near 1 so the gate gradients of exact-match networks
    are alive at initialization; the penalty is annealed in linearly over
    the first half of the run.
    """
    if not 0 < area < 1:
        raise ConfigError(f"area must be in (0, 1), got {area}")
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    x = sample.image
    c, h, w = x.shape
    blurred = gaussian_blur(x, blur_sigma)
    contrast = x - blurred
    seed_vec = onehot_seed(sub, tgt)

    n_pix = h * w
    k = max(1, int(round(area * n_pix)))
    reference = np.zeros(n_pix)
    reference[:k] = 1.0

    rng = np.random.default_rng(seed)
    theta = 6.0 + 0.01 * rng.standard_normal((h, w))
    y_full, _ = forward(sub, x)
    y_orig = float(y_full.reshape(-1)[0]) if tgt == SCALAR_TARGET else None

    for it in range(steps):
        m = 1.0 / (1.0 + np.exp(-theta))
        blend = m[None] * x + (1.0 - m[None]) * blurred
        y, trace = forward(sub, blend)
        if tgt == SCALAR_TARGET:
            score = -((float(y.reshape(-1)[0]) - y_orig) ** 2)
            out_seed = seed_vec * (-2.0 * (float(y.reshape(-1)[0]) - y_orig))
        else:
            score = float(y[int(tgt)])
            out_seed = seed_vec
        if not np.isfinite(score):
            raise ConfigError(f"extremal perturbation diverged at step {it}")
        dblend = backward(sub, trace, out_seed)
        grad_m = (dblend * contrast).sum(axis=0)

        lam = penalty * min(1.0, 2.0 * (it + 1) / steps)
        flat = m.reshape(-1)
        order = np.argsort(-flat, kind="stable")
        pen_grad = np.zeros(n_pix)
        pen_grad[order] = 2.0 * (flat[order] - reference)
        grad_m -= lam * pen_grad.reshape(h, w)

        theta += step_size * grad_m * m * (1.0 - m)

    final = 1.0 / (1.0 + np.exp(-theta))
    return AttributionMap(
        values=final,
        method="extremal-perturbation",
        fingerprint=fingerprint(
            "extremal-perturbation",
            {
                "area": area,
                "blur_sigma": blur_sigma,
                "steps": steps,
                "step_size": step_size,
                "penalty": penalty,
                "seed": seed,
                "output_tap": output_tap,
            },
        ),
        target=tgt,
        signed=False,
    )
