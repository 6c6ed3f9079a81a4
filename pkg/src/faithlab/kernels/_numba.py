"""JIT kernels. Parallel loops only run over independent output elements,
so results do not depend on the thread count."""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def conv2d_general_forward(x, w, b, sh, sw):
    n, c, h, wd = x.shape
    o, _, kh, kw = w.shape
    oh = (h - kh) // sh + 1
    ow = (wd - kw) // sw + 1
    out = np.empty((n, o, oh, ow))
    for img in prange(n):
        for oc in range(o):
            for i in range(oh):
                for j in range(ow):
                    acc = b[oc]
                    i0 = i * sh
                    j0 = j * sw
                    for ic in range(c):
                        for di in range(kh):
                            for dj in range(kw):
                                acc += w[oc, ic, di, dj] * x[img, ic, i0 + di, j0 + dj]
                    out[img, oc, i, j] = acc
    return out


@njit(cache=True, parallel=True)
def conv2d_general_input_grad(g, w, sh, sw, h, wd):
    n, o, oh, ow = g.shape
    _, c, kh, kw = w.shape
    dx = np.zeros((n, c, h, wd))
    for img in prange(n):
        for oc in range(o):
            for i in range(oh):
                for j in range(ow):
                    gv = g[img, oc, i, j]
                    i0 = i * sh
                    j0 = j * sw
                    for ic in range(c):
                        for di in range(kh):
                            for dj in range(kw):
                                dx[img, ic, i0 + di, j0 + dj] += gv * w[oc, ic, di, dj]
    return dx


@njit(cache=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@njit(cache=True)
def fz_merge(n, edges, weights, scale, min_size):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    # internal difference of a component, updated on merge
    internal = np.zeros(n)
    for e in range(edges.shape[0]):
        a = _find(parent, edges[e, 0])
        b = _find(parent, edges[e, 1])
        if a == b:
            continue
        wt = weights[e]
        if wt <= internal[a] + scale / size[a] and wt <= internal[b] + scale / size[b]:
            parent[b] = a
            size[a] += size[b]
            internal[a] = wt
    # enforce minimum component size
    for e in range(edges.shape[0]):
        a = _find(parent, edges[e, 0])
        b = _find(parent, edges[e, 1])
        if a != b and (size[a] < min_size or size[b] < min_size):
            parent[b] = a
            size[a] += size[b]
    return parent


@njit(cache=True)
def fz_flatten(parent):
    n = parent.shape[0]
    roots = np.empty(n, dtype=np.int64)
    for i in range(n):
        roots[i] = _find(parent, i)
    return roots
