"""Pixel-wise gates as 1x1 convolution stacks.

The color detector maps a 3xHxW RGB image to (n_classes + n_redundant)xHxW
indicator maps: channel i fires exactly where the pixel equals target color
i, and every redundant channel fires exactly where the pixel matches
neither a target color nor the background. The background is detected
internally (so it can be ignored) but not exposed as an output channel.

The white gate is the single-channel analogue: an equality gate at
intensity 255 applied per pixel.
"""

import numpy as np

from faithlab.forge.configs import MultiColorConfig
from faithlab.graph import Layer


def _named(layers, prefix):
    out = []
    for k, (kind, w, b) in enumerate(layers):
        if kind == "conv":
            out.append(Layer("conv", w, b, stride=(1, 1), name=f"{prefix}.layers.{len(out)}"))
        else:
            out.append(Layer("relu", name=f"{prefix}.layers.{len(out)}"))
    return out


def build_white_gate(name: str = "gate") -> list:
    """1xHxW {0,255} map -> 1xHxW white-pixel indicator."""
    w1 = np.ones((3, 1, 1, 1))
    b1 = np.array([-254.0, -255.0, -256.0])
    w2 = np.array([[[[1.0]], [[-1.0]], [[0.0]]], [[[0.0]], [[1.0]], [[-1.0]]]])
    w3 = np.array([[[[1.0]], [[-1.0]]]])
    spec = [
        ("conv", w1, b1),
        ("relu", None, None),
        ("conv", w2, np.zeros(2)),
        ("relu", None, None),
        ("conv", w3, np.zeros(1)),
        ("relu", None, None),
    ]
    return _named(spec, name)


def build_color_detector(cfg: MultiColorConfig, name: str = "detector") -> list:
    """3xHxW RGB -> (n_classes + n_redundant)xHxW indicators."""
    palette = list(cfg.colors) + [cfg.background]  # background detected last
    nc = cfg.n_classes
    np_all = len(palette)

    # stage 1: three shifted copies per color component
    w1 = np.zeros((9 * np_all, 3, 1, 1))
    b1 = np.zeros(9 * np_all)
    for k, color in enumerate(palette):
        for c in range(3):
            v = float(color[c])
            for q, shift in enumerate((v - 1.0, v, v + 1.0)):
                row = 9 * k + 3 * c + q
                w1[row, c, 0, 0] = 1.0
                b1[row] = -shift

    # stage 2: strict-greater pair per component
    w2 = np.zeros((6 * np_all, 9 * np_all, 1, 1))
    for k in range(np_all):
        for c in range(3):
            lo, mid, hi = (9 * k + 3 * c + q for q in range(3))
            w2[6 * k + 2 * c + 0, lo, 0, 0] = 1.0
            w2[6 * k + 2 * c + 0, mid, 0, 0] = -1.0
            w2[6 * k + 2 * c + 1, mid, 0, 0] = 1.0
            w2[6 * k + 2 * c + 1, hi, 0, 0] = -1.0

    # stage 3: per-component equality
    w3 = np.zeros((3 * np_all, 6 * np_all, 1, 1))
    for k in range(np_all):
        for c in range(3):
            w3[3 * k + c, 6 * k + 2 * c + 0, 0, 0] = 1.0
            w3[3 * k + c, 6 * k + 2 * c + 1, 0, 0] = -1.0

    # stage 4: full-color match, all three components at once
    w4 = np.zeros((np_all, 3 * np_all, 1, 1))
    b4 = np.full(np_all, -2.0)
    for k in range(np_all):
        w4[k, 3 * k : 3 * k + 3, 0, 0] = 1.0

    # stage 5: pass target channels, derive redundant channels
    out_ch = nc + cfg.n_redundant
    w5 = np.zeros((out_ch, np_all, 1, 1))
    b5 = np.zeros(out_ch)
    for i in range(nc):
        w5[i, i, 0, 0] = 1.0
    for r in range(cfg.n_redundant):
        w5[nc + r, :, 0, 0] = -1.0  # any match (incl. background) suppresses
        b5[nc + r] = 1.0

    spec = [
        ("conv", w1, b1), ("relu", None, None),
        ("conv", w2, np.zeros(6 * np_all)), ("relu", None, None),
        ("conv", w3, np.zeros(3 * np_all)), ("relu", None, None),
        ("conv", w4, b4), ("relu", None, None),
        ("conv", w5, b5), ("relu", None, None),
    ]
    return _named(spec, name)
