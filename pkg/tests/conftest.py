import numpy as np
import pytest

from faithlab.graph import Layer, NetGraph


def random_net(rng, in_shape=(2, 6, 6), with_softmax=False, with_bias=True):
    """Small random conv/linear/relu stack for gradient and rule checks."""
    c, h, w = in_shape
    layers = []
    oc = 3
    kw = {"size": (oc, c, 2, 2)}
    wconv = rng.normal(scale=0.7, **kw)
    bconv = rng.normal(scale=0.3, size=oc) if with_bias else None
    layers.append(Layer("conv", wconv, bconv, stride=(2, 2)))
    layers.append(Layer("relu"))
    oh, ow = h // 2, w // 2
    layers.append(Layer("flatten"))
    n_in = oc * oh * ow
    w1 = rng.normal(scale=0.5, size=(8, n_in))
    b1 = rng.normal(scale=0.3, size=8) if with_bias else None
    layers.append(Layer("linear", w1, b1))
    layers.append(Layer("relu"))
    w2 = rng.normal(scale=0.5, size=(4, 8))
    b2 = rng.normal(scale=0.3, size=4) if with_bias else None
    layers.append(Layer("linear", w2, b2))
    if with_softmax:
        layers.append(Layer("softmax"))
    return NetGraph(layers, input_shape=in_shape)


def central_difference(f, x, h=1e-5):
    """Finite-difference gradient of scalar f at x, one probe per element."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        xp = x.copy()
        xp[idx] += h
        xm = x.copy()
        xm[idx] -= h
        grad[idx] = (f(xp) - f(xm)) / (2 * h)
    return grad


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
