"""Numeric kernels with a numba fast path and a pure-numpy fallback.

Two kinds of operations live here:

* BLAS-shaped contractions (``linear``, ``conv1x1``, convolutions whose
  stride equals the kernel, i.e. non-overlapping windows). These reduce to
  ``numpy.matmul`` and are identical on both backends.
* Loop-shaped kernels (general strided convolution forward/input-gradient,
  the Felzenszwalb merge loop). These dispatch to ``_numba`` or ``_numpy``
  according to :mod:`faithlab.backend`.

All arrays are float64. Convolutions use no padding.
"""

import numpy as np

from faithlab.backend import ACTIVE

if ACTIVE == "numba":
    from faithlab.kernels import _numba as _impl
else:
    from faithlab.kernels import _numpy as _impl

IMPL_NAME = ACTIVE


def conv_out_size(size: int, k: int, s: int) -> int:
    if size < k:
        raise ValueError(f"input extent {size} smaller than kernel {k}")
    return (size - k) // s + 1


def conv2d_forward(x, w, b, stride):
    """Strided valid convolution. x (N,C,H,W), w (O,C,kh,kw), b (O,)."""
    n, c, h, wd = x.shape
    o, ci, kh, kw = w.shape
    if ci != c:
        raise ValueError(f"conv weight expects {ci} channels, input has {c}")
    sh, sw = stride
    oh, ow = conv_out_size(h, kh, sh), conv_out_size(wd, kw, sw)
    if sh == kh and sw == kw and h == oh * kh and wd == ow * kw:
        # non-overlapping tiling: pure reshape + BLAS
        blocks = x.reshape(n, c, oh, kh, ow, kw).transpose(0, 2, 4, 1, 3, 5)
        flat = blocks.reshape(n * oh * ow, c * kh * kw)
        y = flat @ w.reshape(o, -1).T
        y = y.reshape(n, oh, ow, o).transpose(0, 3, 1, 2)
        if b is not None:
            y = y + b[None, :, None, None]
        return np.ascontiguousarray(y)
    bb = b if b is not None else np.zeros(o)
    return _impl.conv2d_general_forward(
        np.ascontiguousarray(x), np.ascontiguousarray(w), bb, sh, sw
    )


def conv2d_input_grad(g, w, stride, in_hw):
    """Gradient of conv2d_forward wrt its input. g (N,O,OH,OW) -> (N,C,H,W)."""
    n, o, oh, ow = g.shape
    oc, c, kh, kw = w.shape
    h, wd = in_hw
    sh, sw = stride
    if sh == kh and sw == kw and h == oh * kh and wd == ow * kw:
        flat = g.transpose(0, 2, 3, 1).reshape(n * oh * ow, o)
        cols = flat @ w.reshape(o, -1)
        blocks = cols.reshape(n, oh, ow, c, kh, kw).transpose(0, 3, 1, 4, 2, 5)
        return np.ascontiguousarray(blocks.reshape(n, c, h, wd))
    return _impl.conv2d_general_input_grad(
        np.ascontiguousarray(g), np.ascontiguousarray(w), sh, sw, h, wd
    )


def linear_forward(x, w, b):
    """x (N,in) @ w (out,in).T + b."""
    y = x @ w.T
    if b is not None:
        y = y + b
    return y


def linear_input_grad(g, w):
    return g @ w


def fz_segment(feat, edges, weights, scale, min_size):
    """Felzenszwalb graph merge. feat is only used for its pixel count.

    edges (E,2) int64 node pairs, weights (E,) float64, returns int64 labels
    per node, relabelled to a dense 0..K-1 range.
    """
    order = np.argsort(weights, kind="stable")
    e = np.ascontiguousarray(edges[order])
    wts = np.ascontiguousarray(weights[order])
    n = feat.shape[0]
    parent = _impl.fz_merge(n, e, wts, float(scale), int(min_size))
    roots = _impl.fz_flatten(parent)
    _, labels = np.unique(roots, return_inverse=True)
    return labels.astype(np.int64)
