"""LIME: superpixels as features, weighted ridge regression as surrogate."""

import numpy as np

from faithlab.attr.common import (
    POST_SOFTMAX,
    SCALAR_TARGET,
    output_net,
    resolve_target,
)
from faithlab.attr.maps import AttributionMap, BaselineSpec, fingerprint
from faithlab.attr.segmentation import Segmentation
from faithlab.errors import ConfigError
from faithlab.graph import forward

_LIME_CHUNK = 256


def weighted_ridge(masks, ys, weights, lam):
    """Ridge with unpenalized intercept; returns (coefs, intercept)."""
    z = np.concatenate([np.ones((len(masks), 1)), masks], axis=1)
    wz = z * weights[:, None]
    a = z.T @ wz
    reg = np.eye(z.shape[1]) * lam
    reg[0, 0] = 0.0
    b = wz.T @ ys
    try:
        beta = np.linalg.solve(a + reg, b)
    except np.linalg.LinAlgError:
        raise ConfigError("singular LIME regression even after bumping lambda")
    return beta[1:], beta[0]


def lime(
    net,
    sample,
    target=None,
    segmentation: Segmentation = None,
    n_samples: int = 1000,
    kernel_width: float = 0.25,
    ridge_lambda: float = 1e-3,
    seed: int = 0,
    baseline: BaselineSpec = None,
    output_tap=POST_SOFTMAX,
) -> AttributionMap:
    """Random on/off superpixel masks, exponential-kernel weights on the
    cosine distance from the all-on mask, ridge fit, coefficients broadcast
    back to pixels. A singular system retries once with 10x lambda."""
    if segmentation is None or baseline is None:
        raise ConfigError("lime requires a segmentation and a baseline")
    n_seg = segmentation.n_segments
    if n_samples < 2 * n_seg:
        raise ConfigError(
            f"lime needs n_samples >= 2 * segments ({2 * n_seg}), got {n_samples}"
        )
    sub = output_net(net, output_tap)
    tgt = resolve_target(sub, target if target is not None else sample.label)
    x = sample.image
    fill = baseline.image(x.shape)
    rng = np.random.default_rng(seed)
    masks = rng.integers(0, 2, size=(n_samples, n_seg)).astype(np.float64)
    masks[0] = 1.0  # keep the unperturbed image in the fit

    seg_map = segmentation.labels
    ys = np.empty(n_samples)
    for lo in range(0, n_samples, _LIME_CHUNK):
        hi = min(lo + _LIME_CHUNK, n_samples)
        pix_on = masks[lo:hi][:, seg_map]  # (B, H, W)
        batch = pix_on[:, None] * x[None] + (1.0 - pix_on[:, None]) * fill[None]
        out, _ = forward(sub, batch)
        out = out.reshape(hi - lo, -1)
        ys[lo:hi] = out[:, 0] if tgt == SCALAR_TARGET else out[:, int(tgt)]

    frac_on = masks.mean(axis=1)
    cosine_dist = 1.0 - np.sqrt(np.maximum(frac_on, 0.0))
    weights = np.exp(-(cosine_dist**2) / kernel_width**2)

    try:
        coefs, intercept = weighted_ridge(masks, ys, weights, ridge_lambda)
    except ConfigError:
        coefs, intercept = weighted_ridge(masks, ys, weights, ridge_lambda * 10)

    return AttributionMap(
        values=coefs[seg_map],
        method="lime",
        fingerprint=fingerprint(
            "lime",
            {
                "segmentation": segmentation.algorithm,
                "seg_params": segmentation.params,
                "n_samples": n_samples,
                "kernel_width": kernel_width,
                "ridge_lambda": ridge_lambda,
                "seed": seed,
                "baseline": baseline.key(),
                "output_tap": output_tap,
            },
        ),
        target=tgt,
        signed=True,
        extras={"intercept": float(intercept), "n_segments": n_seg},
    )
