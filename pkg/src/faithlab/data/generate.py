"""Dataset generators for the two environments.

Every sample carries a signed ground-truth mask in {-1, 0, +1} that is
recomputable from the image alone; generation is fully determined by
(config, seed, sample index). Samples violating a well-formedness rule
(patch overlap, fewer than ``MIN_PATCH_PIXELS`` surviving pixels, tied
winning counts, zero-label modulo images) are regenerated from a fresh
per-attempt stream rather than patched up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from faithlab.data import shapes
from faithlab.errors import ConfigError, DatasetIOError
from faithlab.forge.configs import MultiColorConfig, SingleColorConfig

N_PATCHES = 4
MIN_PATCH_PIXELS = 10
RADIUS_FRACTIONS = (0.1, 0.2)  # of image height
_MAX_SAMPLE_ATTEMPTS = 60
_MAX_PLACE_ATTEMPTS = 80

GT_VARIANTS = ("overall", "positive", "negative", "smoothed-positive")


@dataclass
class LabSample:
    """One image, its label, and the signed ground-truth relevance mask."""

    image: np.ndarray  # (C, H, W) float64, 8-bit integer values
    label: int
    gt_signed: np.ndarray  # (H, W) float64 in {-1, 0, +1}
    meta: dict = field(default_factory=dict)

    @property
    def height(self):
        return self.image.shape[1]

    @property
    def width(self):
        return self.image.shape[2]


def _place_patches(rng, h, w, want_shapes):
    """Non-overlapping patch masks; returns (masks, specs) or None."""
    occupied = np.zeros((h, w), dtype=bool)
    masks, specs = [], []
    # lower bound keeps thinned patches above MIN_PATCH_PIXELS on small images
    r_lo = max(RADIUS_FRACTIONS[0] * h, 3.5)
    r_hi = max(RADIUS_FRACTIONS[1] * h, r_lo + 1.0)
    for p, kind in enumerate(want_shapes):
        for _ in range(_MAX_PLACE_ATTEMPTS):
            radius = rng.uniform(r_lo, r_hi)
            margin = int(np.ceil(radius * 1.3)) + 1
            if 2 * margin >= min(h, w):
                continue
            cy = int(rng.integers(margin, h - margin))
            cx = int(rng.integers(margin, w - margin))
            if kind == "blob":
                mask = shapes.blob_mask((cy, cx), radius, rng, h, w)
            elif kind == "circle":
                mask = shapes.circle_mask((cy, cx), radius, h, w)
            elif kind == "square":
                mask = shapes.square_mask((cy, cx), radius, h, w)
            elif kind == "triangle":
                mask = shapes.triangle_mask((cy, cx), radius, rng, h, w)
            else:
                raise ConfigError(f"unknown patch shape {kind!r}")
            if mask.sum() < MIN_PATCH_PIXELS or (mask & occupied).any():
                continue
            occupied |= mask
            masks.append(mask)
            specs.append(
                {
                    "shape": kind,
                    "center": [cy, cx],
                    "radius": round(float(radius), 4),
                }
            )
            break
        else:
            return None
    return masks, specs


def gen_single_color(
    cfg: SingleColorConfig,
    count: int,
    seed: int = None,
    reject_zero_label: bool = True,
) -> list:
    """Monochrome images of 4 Bezier blobs, Bernoulli(0.5)-thinned to white
    pixels on black; label = (#white) mod N. Zero-label images make the
    network output identically zero (a degenerate case for several signed
    methods), so they are regenerated unless ``reject_zero_label=False``."""
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    seed = cfg.seed if seed is None else seed
    h, w = cfg.height, cfg.width
    out = []
    for i in range(count):
        for attempt in range(_MAX_SAMPLE_ATTEMPTS):
            rng = np.random.default_rng([seed, i, attempt])
            placed = _place_patches(rng, h, w, ["blob"] * N_PATCHES)
            if placed is None:
                continue
            masks, specs = placed
            white = np.zeros((h, w), dtype=bool)
            ok = True
            for mask in masks:
                keep = mask & (rng.random((h, w)) < 0.5)
                if keep.sum() < MIN_PATCH_PIXELS:
                    ok = False
                    break
                white |= keep
            if not ok:
                continue
            n_white = int(white.sum())
            label = n_white % cfg.modulus
            if reject_zero_label and label == 0:
                continue
            image = np.where(white, 255.0, 0.0)[None]
            out.append(
                LabSample(
                    image=image,
                    label=label,
                    gt_signed=white.astype(np.float64),
                    meta={
                        "index": i,
                        "seed": seed,
                        "attempt": attempt,
                        "n_white": n_white,
                        "patch_areas": [int(m.sum()) for m in masks],
                        "patches": specs,
                    },
                )
            )
            break
        else:
            raise DatasetIOError(
                f"could not generate sample {i} after {_MAX_SAMPLE_ATTEMPTS} attempts"
            )
    return out


def gen_multi_color(cfg: MultiColorConfig, count: int, seed: int = None) -> list:
    """One patch per target color (triangle/square/circle), each pixel kept
    at the patch color with probability 0.5 (else background); label = the
    color with strictly the most pixels. Ties regenerate the sample."""
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    seed = cfg.seed if seed is None else seed
    h, w = cfg.height, cfg.width
    bg = np.array(cfg.background, dtype=np.float64)
    out = []
    for i in range(count):
        for attempt in range(_MAX_SAMPLE_ATTEMPTS):
            rng = np.random.default_rng([seed, i, attempt])
            kinds = [
                ("triangle", "square", "circle")[int(rng.integers(3))]
                for _ in range(cfg.n_classes)
            ]
            placed = _place_patches(rng, h, w, kinds)
            if placed is None:
                continue
            masks, specs = placed
            image = np.empty((3, h, w), dtype=np.float64)
            image[:] = bg[:, None, None]
            gt = np.zeros((h, w), dtype=np.float64)
            counts = []
            ok = True
            for k, mask in enumerate(masks):
                specs[k]["color_index"] = k
                keep = mask & (rng.random((h, w)) >= 0.5)
                n = int(keep.sum())
                if n < MIN_PATCH_PIXELS:
                    ok = False
                    break
                counts.append(n)
                for c in range(3):
                    image[c][keep] = float(cfg.colors[k][c])
            if not ok:
                continue
            order = np.sort(counts)
            if len(order) > 1 and order[-1] == order[-2]:
                continue  # tied winner: "most pixels" must be unique
            label = int(np.argmax(counts))
            for k, mask in enumerate(masks):
                colored = _pixels_of_color(image, cfg.colors[k]) & mask
                gt[colored] = 1.0 if k == label else -1.0
            out.append(
                LabSample(
                    image=image,
                    label=label,
                    gt_signed=gt,
                    meta={
                        "index": i,
                        "seed": seed,
                        "attempt": attempt,
                        "color_counts": counts,
                        "patch_areas": [int(m.sum()) for m in masks],
                        "patches": specs,
                    },
                )
            )
            break
        else:
            raise DatasetIOError(
                f"could not generate sample {i} after {_MAX_SAMPLE_ATTEMPTS} attempts"
            )
    return out


def _pixels_of_color(image, color):
    return (
        (image[0] == color[0]) & (image[1] == color[1]) & (image[2] == color[2])
    )


def color_index_map(image: np.ndarray, cfg: MultiColorConfig) -> np.ndarray:
    """(H, W) int map: index of the target color at each pixel, -1 elsewhere."""
    idx = np.full(image.shape[1:], -1, dtype=np.int64)
    for k, color in enumerate(cfg.colors):
        idx[_pixels_of_color(image, color)] = k
    return idx


def _box_dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    out = mask.copy()
    h, w = mask.shape
    padded = np.zeros((h + 2 * radius, w + 2 * radius), dtype=bool)
    padded[radius : radius + h, radius : radius + w] = mask
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            out |= padded[radius + dy : radius + dy + h, radius + dx : radius + dx + w]
    return out


def gt_mask(sample: LabSample, variant: str, radius: int = 1) -> np.ndarray:
    """Derive a scoring mask from the signed ground truth.

    overall            |gt|
    positive           max(gt, 0)
    negative           max(-gt, 0)
    smoothed-positive  box dilation of the positive mask by ``radius``
    """
    gt = sample.gt_signed
    if variant == "overall":
        return np.abs(gt)
    if variant == "positive":
        return np.maximum(gt, 0.0)
    if variant == "negative":
        return np.maximum(-gt, 0.0)
    if variant == "smoothed-positive":
        return _box_dilate(gt > 0, radius).astype(np.float64)
    raise ConfigError(f"unknown gt variant {variant!r}; use one of {GT_VARIANTS}")
