"""The modulo head: an MLP computing x mod N for integer x in [0, U].

Seven Linear+ReLU stages. Writing M = ceil(U / N):

    shift bank      x -> (x, x-N, ..., x-MN)                width M+1
    difference      consecutive differences, clamped        width M
                    result: (N, ..., N, x mod N, 0, ..., 0)
    flag, 3 stages  append an eq_N flag next to each entry  width 4M/3M/2M
    subtract        entry - N * flag                        width M
    sum             total = x mod N                         width 1

The three flag stages expand the equality gate inline: every entry is
carried through by an identity row (safe under ReLU since all values are
non-negative) while its gate thresholds are computed alongside.
"""

import math

import numpy as np

from faithlab.errors import ConfigError
from faithlab.graph import Layer, NetGraph


def modulo_layers(n: int, u: int, name: str = "head") -> list:
    if not 2 <= n <= u:
        raise ConfigError(f"need 2 <= modulus <= capacity, got N={n}, U={u}")
    m = math.ceil(u / n)

    w1 = np.ones((m + 1, 1))
    b1 = -float(n) * np.arange(m + 1)

    w2 = np.zeros((m, m + 1))
    for j in range(m):
        w2[j, j] = 1.0
        w2[j, j + 1] = -1.0

    # thresholds for the inline eq_N gate: x, x-(N-1), x-N, x-(N+1)
    w3a = np.zeros((4 * m, m))
    b3a = np.zeros(4 * m)
    for j in range(m):
        for q, shift in enumerate((0.0, n - 1.0, float(n), n + 1.0)):
            w3a[4 * j + q, j] = 1.0
            b3a[4 * j + q] = -shift

    # pass-through, gt_{N-1}, gt_N
    w3b = np.zeros((3 * m, 4 * m))
    for j in range(m):
        w3b[3 * j + 0, 4 * j + 0] = 1.0
        w3b[3 * j + 1, 4 * j + 1] = 1.0
        w3b[3 * j + 1, 4 * j + 2] = -1.0
        w3b[3 * j + 2, 4 * j + 2] = 1.0
        w3b[3 * j + 2, 4 * j + 3] = -1.0

    # pass-through, eq_N flag
    w3c = np.zeros((2 * m, 3 * m))
    for j in range(m):
        w3c[2 * j + 0, 3 * j + 0] = 1.0
        w3c[2 * j + 1, 3 * j + 1] = 1.0
        w3c[2 * j + 1, 3 * j + 2] = -1.0

    w4 = np.zeros((m, 2 * m))
    for j in range(m):
        w4[j, 2 * j + 0] = 1.0
        w4[j, 2 * j + 1] = -float(n)

    w5 = np.ones((1, m))

    layers = []
    mats = [(w1, b1), (w2, None), (w3a, b3a), (w3b, None), (w3c, None),
            (w4, None), (w5, None)]
    for k, (w, b) in enumerate(mats):
        bias = b if b is not None else np.zeros(w.shape[0])
        layers.append(Layer("linear", w, bias, name=f"{name}.layers.{2 * k}"))
        layers.append(Layer("relu", name=f"{name}.layers.{2 * k + 1}"))
    return layers


def build_modulo_head(n: int, u: int) -> NetGraph:
    """Standalone head on a scalar input; exact on integers in [0, u]."""
    return NetGraph(modulo_layers(n, u), input_shape=(1,))
