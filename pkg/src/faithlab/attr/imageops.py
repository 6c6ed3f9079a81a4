"""Small image operators used inside attribution methods."""

import numpy as np


def blur_matrix(n: int, sigma: float) -> np.ndarray:
    """Row-normalized 1-D Gaussian blur operator (truncated, renormalized)."""
    idx = np.arange(n)
    d2 = (idx[:, None] - idx[None, :]) ** 2
    m = np.exp(-d2 / (2.0 * sigma * sigma))
    radius = int(np.ceil(3 * sigma))
    m[d2 > radius * radius] = 0.0
    return m / m.sum(axis=1, keepdims=True)


def gaussian_blur(image: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur of a (C, H, W) image."""
    if sigma <= 0:
        return image.copy()
    c, h, w = image.shape
    bh = blur_matrix(h, sigma)
    bw = blur_matrix(w, sigma)
    return np.einsum("ij,cjk,lk->cil", bh, image, bw, optimize=True)


def bilinear_upsample(maps: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """(..., h, w) -> (..., out_h, out_w), half-pixel-centre convention."""
    h, w = maps.shape[-2:]
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    x1 = np.clip(x0 + 1, 0, w - 1)
    wy = np.clip(ys - y0, 0.0, 1.0)
    wx = np.clip(xs - x0, 0.0, 1.0)
    top = (
        maps[..., y0[:, None], x0[None, :]] * (1 - wx)[None, :]
        + maps[..., y0[:, None], x1[None, :]] * wx[None, :]
    )
    bot = (
        maps[..., y1[:, None], x0[None, :]] * (1 - wx)[None, :]
        + maps[..., y1[:, None], x1[None, :]] * wx[None, :]
    )
    return top * (1 - wy)[:, None] + bot * wy[:, None]
