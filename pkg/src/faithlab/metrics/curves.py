"""Perturbation-based faithfulness curves.

Standard Insertion/Deletion (multi-class environment): pixels are removed
from the image, or inserted into a replacement-filled canvas, in descending
attribution order at a fixed fraction per step; the curve tracks the
post-softmax probability of the target class and is summarized by its
trapezoidal AUC.

Adapted variants (modulo environment): a fixed number of perturbed pixels
can leave the modulo output unchanged, so pixels are perturbed one at a
time and a step counts as correct exactly when consecutive outputs differ.
The curve accumulates correct steps normalized by the ground-truth pixel
count; insertion rises from 0, deletion falls from 1.

Sensitivity-N: correlation between the summed attribution of a perturbed
pixel set and the model response, over random repeats per set size. The
adapted variant grows each repeat's set one random pixel at a time and
correlates accumulated correct steps instead of raw outputs.

Attribution ties are broken by row-major pixel index everywhere, so curves
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from faithlab.attr.maps import AttributionMap, BaselineSpec
from faithlab.errors import ConfigError
from faithlab.graph import forward
from faithlab.metrics.stats import safe_pearson

INSERTION = "insertion"
DELETION = "deletion"

_CHUNK = 256
_OUTPUT_CHANGED = 0.5  # modulo outputs are integers; any real change exceeds this


@dataclass
class CurveResult:
    x: np.ndarray
    y: np.ndarray
    auc: float
    mode: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if np.any(np.diff(self.x) <= 0):
            raise ConfigError("curve x grid must be strictly increasing")


def _order_pixels(values: np.ndarray) -> np.ndarray:
    """Flat pixel indices, descending value, row-major ties."""
    flat = values.reshape(-1)
    return np.argsort(-flat, kind="stable")


def _target_prob(net, images, target):
    out, _ = forward(net, images)
    return out.reshape(images.shape[0], -1)[:, int(target)]


def _prefix_images(base, source, order, counts):
    """Images where the first counts[b] ordered pixels of ``base`` are
    replaced by ``source``. base/source are (C, H, W)."""
    c = base.shape[0]
    p = base.shape[1] * base.shape[2]
    rank = np.empty(p, dtype=np.int64)
    rank[order] = np.arange(p)
    take = rank[None, :] < np.asarray(counts)[:, None]  # (B, P)
    flat_base = base.reshape(c, p)
    flat_src = source.reshape(c, p)
    out = np.where(take[:, None, :], flat_src[None], flat_base[None])
    return out.reshape(len(counts), c, base.shape[1], base.shape[2])


def insertion_deletion(
    net,
    sample,
    amap: AttributionMap,
    mode: str,
    replacement: BaselineSpec,
    batch_fraction: float = 0.02,
) -> CurveResult:
    """Standard curves on the classification environment (post-softmax)."""
    if mode not in (INSERTION, DELETION):
        raise ConfigError(f"mode must be insertion|deletion, got {mode!r}")
    x_img = sample.image
    fill = replacement.image(x_img.shape)
    h, w = x_img.shape[1:]
    p = h * w
    order = _order_pixels(amap.values)
    steps = np.unique(
        np.clip(np.round(np.arange(0.0, 1.0 + 1e-9, batch_fraction) * p), 0, p)
    ).astype(np.int64)
    if mode == DELETION:
        base, source = x_img, fill
    else:
        base, source = fill, x_img
    ys = np.empty(len(steps))
    target = int(amap.target)
    for lo in range(0, len(steps), _CHUNK):
        hi = min(lo + _CHUNK, len(steps))
        batch = _prefix_images(base, source, order, steps[lo:hi])
        ys[lo:hi] = _target_prob(net, batch, target)
    xs = steps / p
    return CurveResult(
        x=xs, y=ys, auc=float(np.trapezoid(ys, xs)), mode=mode,
        meta={"replacement": replacement.key(), "batch_fraction": batch_fraction},
    )


def _consecutive_correct(net, base, source, order, n_steps):
    """Correctness indicators for per-pixel perturbation in ``order``.

    Step k (1-based) compares outputs after k and k-1 replacements; honest
    evaluation of the network at every step, batched.
    """
    counts = np.arange(0, n_steps + 1)
    outs = np.empty(len(counts))
    for lo in range(0, len(counts), _CHUNK):
        hi = min(lo + _CHUNK, len(counts))
        batch = _prefix_images(base, source, order, counts[lo:hi])
        y, _ = forward(net, batch)
        outs[lo:hi] = y.reshape(hi - lo, -1)[:, 0]
    return np.abs(np.diff(outs)) > _OUTPUT_CHANGED


def adapted_insertion_deletion(
    net, sample, amap: AttributionMap, mode: str
) -> CurveResult:
    """Per-pixel curves on the modulo environment (replacement intensity 0).

    Perturbation stops one step after the last ground-truth pixel in the
    ordering (the remainder of the curve is flat) and a tail point at
    fraction 1 closes the grid.
    """
    if mode not in (INSERTION, DELETION):
        raise ConfigError(f"mode must be insertion|deletion, got {mode!r}")
    x_img = sample.image
    fill = np.zeros_like(x_img)
    h, w = x_img.shape[1:]
    p = h * w
    order = _order_pixels(amap.values)
    gt_flat = (np.abs(sample.gt_signed) > 0).reshape(-1)
    n_gt = int(gt_flat.sum())
    if n_gt == 0:
        raise ConfigError("sample has no ground-truth pixels")
    last_gt = int(np.nonzero(gt_flat[order])[0].max()) + 1
    n_steps = min(p, last_gt)
    if mode == DELETION:
        base, source = x_img, fill
    else:
        base, source = fill, x_img
    correct = _consecutive_correct(net, base, source, order, n_steps)
    cum = np.concatenate([[0], np.cumsum(correct)]) / n_gt
    ys = cum if mode == INSERTION else 1.0 - cum
    xs = np.arange(n_steps + 1) / p
    if n_steps < p:  # flat tail after the last ground-truth pixel
        xs = np.concatenate([xs, [1.0]])
        ys = np.concatenate([ys, [ys[-1]]])
    return CurveResult(
        x=xs, y=ys, auc=float(np.trapezoid(ys, xs)), mode=f"adapted-{mode}",
        meta={"n_gt": n_gt, "steps_evaluated": int(n_steps)},
    )


def oracle_adapted_auc(sample, mode: str) -> float:
    """Brute-force AUC of the perfect ordering (all ground-truth pixels
    first); no network involved."""
    h, w = sample.gt_signed.shape
    p = h * w
    n_gt = int((np.abs(sample.gt_signed) > 0).sum())
    ys = np.concatenate([np.arange(n_gt + 1) / n_gt, [1.0]])
    xs = np.concatenate([np.arange(n_gt + 1) / p, [1.0]])
    if mode == INSERTION:
        return float(np.trapezoid(ys, xs))
    return float(np.trapezoid(1.0 - ys, xs))


def sensitivity_n(
    net,
    sample,
    amap: AttributionMap,
    mode: str = "standard",
    repeats: int = 100,
    n_grid=None,
    replacement: BaselineSpec = None,
    seed: int = 0,
) -> CurveResult:
    """Correlation of summed attribution with the model response.

    standard: independent random N-pixel sets per repeat; response is the
    drop in post-softmax target probability caused by the perturbation
    (using the raw probability would flip every sign: removing positive
    evidence lowers the output, so faithful maps must correlate with the
    change, not the level).
    adapted:  each repeat grows one accumulative set a pixel at a time with
    replacement intensity 0; response is the accumulated count of correct
    (output-changing) steps, read off at the grid sizes.

    Zero-variance points are recorded as 0 and flagged.
    """
    if repeats < 2:
        raise ConfigError(f"sensitivity-n needs repeats >= 2, got {repeats}")
    if mode not in ("standard", "adapted"):
        raise ConfigError(f"mode must be standard|adapted, got {mode!r}")
    x_img = sample.image
    h, w = x_img.shape[1:]
    p = h * w
    if n_grid is None:
        n_grid = _default_grid(p if mode == "standard" else min(p, 256))
    n_grid = np.asarray(sorted(set(int(n) for n in n_grid)), dtype=np.int64)
    if n_grid[0] < 1 or n_grid[-1] > p:
        raise ConfigError("n grid must lie within [1, H*W]")
    attr_flat = amap.values.reshape(-1)
    rng = np.random.default_rng(seed)
    rhos = np.empty(len(n_grid))
    flags = []

    if mode == "standard":
        if replacement is None:
            raise ConfigError("standard sensitivity-n needs a replacement baseline")
        fill = replacement.image(x_img.shape)
        target = int(amap.target)
        for gi, n in enumerate(n_grid):
            sums = np.empty(repeats)
            probs = np.empty(repeats)
            for lo in range(0, repeats, _CHUNK):
                hi = min(lo + _CHUNK, repeats)
                batch = np.repeat(x_img[None], hi - lo, axis=0)
                for b in range(lo, hi):
                    pick = rng.choice(p, size=n, replace=False)
                    sums[b] = attr_flat[pick].sum()
                    rows, cols = np.divmod(pick, w)
                    batch[b - lo, :, rows, cols] = fill[:, rows, cols].T
                probs[lo:hi] = _target_prob(net, batch, target)
            rho, ok = safe_pearson(sums, probs)
            rhos[gi] = rho
            if not ok:
                flags.append(int(n))
    else:
        max_n = int(n_grid[-1])
        fill = np.zeros_like(x_img)
        sums = np.zeros((repeats, len(n_grid)))
        responses = np.zeros((repeats, len(n_grid)))
        for r in range(repeats):
            perm = rng.permutation(p)
            correct = _consecutive_correct(net, x_img, fill, perm, max_n)
            cum = np.cumsum(correct)
            cum_attr = np.cumsum(attr_flat[perm[:max_n]])
            responses[r] = cum[n_grid - 1]
            sums[r] = cum_attr[n_grid - 1]
        for gi in range(len(n_grid)):
            rho, ok = safe_pearson(sums[:, gi], responses[:, gi])
            rhos[gi] = rho
            if not ok:
                flags.append(int(n_grid[gi]))
    return CurveResult(
        x=n_grid.astype(np.float64),
        y=rhos,
        auc=float(np.mean(rhos)),
        mode=f"sensitivity-n-{mode}",
        meta={"repeats": repeats, "zero_variance_at": flags, "seed": seed},
    )


def _default_grid(max_n: int):
    grid = []
    n = 1
    while n < max_n:
        grid.append(n)
        n *= 2
    grid.append(max_n)
    return grid
