"""Pure-numpy fallbacks for the JIT kernels. Same signatures, same results;
the Felzenszwalb merge is a plain-python union-find since there is no
vectorized formulation."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_general_forward(x, w, b, sh, sw):
    windows = sliding_window_view(x, (w.shape[2], w.shape[3]), axis=(2, 3))
    windows = windows[:, :, ::sh, ::sw]  # (N,C,OH,OW,kh,kw)
    out = np.einsum("ncijhw,ochw->noij", windows, w, optimize=True)
    return out + b[None, :, None, None]


def conv2d_general_input_grad(g, w, sh, sw, h, wd):
    n, o, oh, ow = g.shape
    _, c, kh, kw = w.shape
    dx = np.zeros((n, c, h, wd))
    rows = np.arange(oh) * sh
    cols = np.arange(ow) * sw
    for di in range(kh):
        for dj in range(kw):
            # contribution of kernel offset (di,dj) to every window origin
            upd = np.einsum("noij,oc->ncij", g, w[:, :, di, dj], optimize=True)
            dx[:, :, rows[:, None] + di, cols[None, :] + dj] += upd
    return dx


def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        parent[a], a = root, parent[a]
    return root


def fz_merge(n, edges, weights, scale, min_size):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    internal = np.zeros(n)
    for e in range(edges.shape[0]):
        a = _find(parent, int(edges[e, 0]))
        b = _find(parent, int(edges[e, 1]))
        if a == b:
            continue
        wt = weights[e]
        if wt <= internal[a] + scale / size[a] and wt <= internal[b] + scale / size[b]:
            parent[b] = a
            size[a] += size[b]
            internal[a] = wt
    for e in range(edges.shape[0]):
        a = _find(parent, int(edges[e, 0]))
        b = _find(parent, int(edges[e, 1]))
        if a != b and (size[a] < min_size or size[b] < min_size):
            parent[b] = a
            size[a] += size[b]
    return parent


def fz_flatten(parent):
    return np.array([_find(parent, i) for i in range(parent.shape[0])], dtype=np.int64)
