"""Rasterizers for the patch shapes used by the dataset generators.

Blobs are closed chains of quadratic Bezier segments: six control points
sit on a jittered circle of the requested radius and each segment runs
between consecutive edge midpoints with the shared point as its control.
Interiors are filled row by row with even-odd crossing counts, so masks
are reproducible from the control points alone.
"""

import numpy as np

N_BLOB_POINTS = 6
_SEGMENT_SAMPLES = 24


def fill_polygon(poly: np.ndarray, h: int, w: int) -> np.ndarray:
    """Even-odd scanline fill of a closed polygon given as (M,2) xy points."""
    mask = np.zeros((h, w), dtype=bool)
    x1 = poly[:, 0]
    y1 = poly[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    keep = y1 != y2
    x1, y1, x2, y2 = x1[keep], y1[keep], x2[keep], y2[keep]
    if len(x1) == 0:
        return mask
    for row in range(h):
        y = row + 0.5
        hit = ((y1 <= y) & (y < y2)) | ((y2 <= y) & (y < y1))
        if not hit.any():
            continue
        xc = x1[hit] + (y - y1[hit]) * (x2[hit] - x1[hit]) / (y2[hit] - y1[hit])
        xc.sort()
        for lo, hi in zip(xc[0::2], xc[1::2]):
            a = max(0, int(np.ceil(lo - 0.5)))
            b = min(w - 1, int(np.floor(hi - 0.5)))
            if a <= b:
                mask[row, a : b + 1] = True
    return mask


def blob_polygon(center, radius: float, rng) -> np.ndarray:
    """Closed quadratic-Bezier outline around jittered circle points."""
    cy, cx = center
    angles = (
        2 * np.pi * np.arange(N_BLOB_POINTS) / N_BLOB_POINTS
        + rng.uniform(-0.3, 0.3, N_BLOB_POINTS)
    )
    radii = radius * rng.uniform(0.75, 1.25, N_BLOB_POINTS)
    pts = np.stack(
        [cx + radii * np.cos(angles), cy + radii * np.sin(angles)], axis=1
    )
    t = np.linspace(0.0, 1.0, _SEGMENT_SAMPLES, endpoint=False)[:, None]
    chain = []
    for k in range(N_BLOB_POINTS):
        p_ctrl = pts[k]
        p0 = (pts[k - 1] + pts[k]) / 2
        p1 = (pts[k] + pts[(k + 1) % N_BLOB_POINTS]) / 2
        seg = (1 - t) ** 2 * p0 + 2 * t * (1 - t) * p_ctrl + t**2 * p1
        chain.append(seg)
    return np.concatenate(chain, axis=0)


def blob_mask(center, radius, rng, h, w) -> np.ndarray:
    return fill_polygon(blob_polygon(center, radius, rng), h, w)


def circle_mask(center, radius, h, w) -> np.ndarray:
    cy, cx = center
    yy, xx = np.mgrid[0:h, 0:w]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def square_mask(center, radius, h, w) -> np.ndarray:
    cy, cx = center
    yy, xx = np.mgrid[0:h, 0:w]
    half = radius / np.sqrt(2.0)  # same area scale as the circle
    return (np.abs(yy - cy) <= half) & (np.abs(xx - cx) <= half)


def triangle_mask(center, radius, rng, h, w) -> np.ndarray:
    cy, cx = center
    theta = rng.uniform(0, 2 * np.pi)
    angles = theta + 2 * np.pi * np.arange(3) / 3
    poly = np.stack(
        [cx + radius * np.cos(angles), cy + radius * np.sin(angles)], axis=1
    )
    return fill_polygon(poly, h, w)
