"""Superpixel segmentations for LIME: a regular grid and the classic
graph-based merge (threshold scale/|C|, then a minimum-size sweep)."""

from dataclasses import dataclass

import numpy as np

from faithlab.attr.imageops import gaussian_blur
from faithlab.errors import ConfigError
from faithlab.kernels import fz_segment


@dataclass
class Segmentation:
    labels: np.ndarray  # (H, W) int64, ids contiguous from 0
    algorithm: str
    params: dict

    @property
    def n_segments(self) -> int:
        return int(self.labels.max()) + 1

    def __post_init__(self):
        ids = np.unique(self.labels)
        if ids[0] != 0 or ids[-1] != len(ids) - 1:
            raise ConfigError("segment ids must be contiguous from 0")


def segment_grid(sample, cell: int) -> Segmentation:
    """Square cells of side ``cell`` (ragged edges join the last full cell)."""
    if cell < 1:
        raise ConfigError(f"grid cell must be positive, got {cell}")
    h, w = sample.image.shape[1:]
    rows = np.minimum(np.arange(h) // cell, (h - 1) // cell)
    cols = np.minimum(np.arange(w) // cell, (w - 1) // cell)
    n_cols = int(cols.max()) + 1
    labels = rows[:, None] * n_cols + cols[None, :]
    return Segmentation(labels.astype(np.int64), "grid", {"cell": cell})


def segment_felzenszwalb(
    sample, scale: float = 100.0, sigma: float = 0.8, min_size: int = 20
) -> Segmentation:
    """Graph-based merge on 8-connected color differences."""
    if scale <= 0 or min_size < 1:
        raise ConfigError("felzenszwalb needs scale > 0 and min_size >= 1")
    img = sample.image
    if sigma > 0:
        img = gaussian_blur(img, sigma)
    c, h, w = img.shape
    ids = np.arange(h * w).reshape(h, w)

    edges, weights = [], []

    def link(a, b):
        d = np.sqrt(
            ((img[(slice(None),) + a] - img[(slice(None),) + b]) ** 2).sum(axis=0)
        )
        edges.append(np.stack([ids[a].ravel(), ids[b].ravel()], axis=1))
        weights.append(d.ravel())

    full = slice(None)
    link((full, slice(0, w - 1)), (full, slice(1, w)))
    link((slice(0, h - 1), full), (slice(1, h), full))
    link((slice(0, h - 1), slice(0, w - 1)), (slice(1, h), slice(1, w)))
    link((slice(0, h - 1), slice(1, w)), (slice(1, h), slice(0, w - 1)))

    labels = fz_segment(
        np.zeros(h * w),
        np.concatenate(edges).astype(np.int64),
        np.concatenate(weights),
        scale,
        min_size,
    )
    return Segmentation(
        labels.reshape(h, w),
        "felzenszwalb",
        {"scale": scale, "sigma": sigma, "min_size": min_size},
    )
