"""Integer threshold and equality gates built from Linear+ReLU pairs.

For integer x the strict-greater gate is

    gt_i(x) = ReLU(ReLU(x - i) - ReLU(x - i - 1))       in {0, 1}

and the equality gate stacks two of them:

    eq_N(x) = ReLU(gt_{N-1}(x) - gt_N(x))               1 iff x == N.

For real-valued x (attribution paths sweep the gates continuously) gt is a
unit-width ramp over (i, i+1) and eq is a unit tent centred on N.
"""

import numpy as np

from faithlab.errors import ConfigError
from faithlab.graph import Layer, NetGraph


def build_gt_gate(i: int) -> NetGraph:
    """Scalar gate: 1 when the (integer) input exceeds ``i``, else 0."""
    if i < 0:
        raise ConfigError(f"gt gate threshold must be >= 0, got {i}")
    l1 = Layer(
        "linear",
        np.array([[1.0], [1.0]]),
        np.array([-float(i), -float(i + 1)]),
        name="gt.shift",
    )
    l2 = Layer("linear", np.array([[1.0, -1.0]]), np.zeros(1), name="gt.diff")
    return NetGraph(
        [l1, Layer("relu"), l2, Layer("relu")], input_shape=(1,)
    )


def build_eq_gate(n: int) -> NetGraph:
    """Scalar gate: 1 when the (integer) input equals ``n``, else 0."""
    if n < 0:
        raise ConfigError(f"eq gate target must be >= 0, got {n}")
    l1 = Layer(
        "linear",
        np.ones((3, 1)),
        np.array([-float(n - 1), -float(n), -float(n + 1)]),
        name="eq.shift",
    )
    l2 = Layer(
        "linear",
        np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]),
        np.zeros(2),
        name="eq.gt-pair",
    )
    l3 = Layer("linear", np.array([[1.0, -1.0]]), np.zeros(1), name="eq.diff")
    return NetGraph(
        [l1, Layer("relu"), l2, Layer("relu"), l3, Layer("relu")],
        input_shape=(1,),
    )
