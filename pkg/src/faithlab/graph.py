"""Minimal dense graph engine: straight-line layer stacks over float64 arrays.

A :class:`NetGraph` is an ordered list of layers whose weights are set
explicitly at construction time; there is no training. :func:`forward`
evaluates the stack and records every intermediate activation in an
:class:`ActivationTrace`; :func:`backward` replays the trace in reverse to
compute exact vector-Jacobian products.

Arrays may be single samples (matching ``net.input_shape``) or batches with
one extra leading axis; traces remember which form they were given.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from faithlab import kernels
from faithlab.errors import ShapeMismatch

LAYER_KINDS = ("conv", "linear", "relu", "softmax", "add", "flatten")


@dataclass(frozen=True)
class Layer:
    """One node of a straight-line network.

    kind        one of conv | linear | relu | softmax | add | flatten
    weight      conv: (outC, inC, kH, kW); linear: (out, in); else None
    bias        conv: (outC,); linear: (out,); else None
    stride      conv only, (strideH, strideW)
    name        optional label used for taps and error messages

    ``add`` carries no parameters: it splits its input in two equal halves
    along the leading feature axis and sums them, which is how the rare
    fan-in of two carried-along branches is merged in a straight-line graph.
    """

    kind: str
    weight: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None
    stride: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ShapeMismatch(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv":
            if self.weight is None or self.weight.ndim != 4:
                raise ShapeMismatch("conv layer needs a (O,C,kh,kw) weight")
            if self.stride is None or len(self.stride) != 2:
                raise ShapeMismatch("conv layer needs a (sh,sw) stride")
            if self.bias is not None and self.bias.shape != (self.weight.shape[0],):
                raise ShapeMismatch("conv bias length must equal out channels")
        elif self.kind == "linear":
            if self.weight is None or self.weight.ndim != 2:
                raise ShapeMismatch("linear layer needs a (out,in) weight")
            if self.bias is not None and self.bias.shape != (self.weight.shape[0],):
                raise ShapeMismatch("linear bias length must equal out features")
        else:
            if self.weight is not None or self.bias is not None:
                raise ShapeMismatch(f"{self.kind} layer carries no parameters")
        if self.weight is not None:
            object.__setattr__(
                self, "weight", np.ascontiguousarray(self.weight, dtype=np.float64)
            )
        if self.bias is not None:
            object.__setattr__(
                self, "bias", np.ascontiguousarray(self.bias, dtype=np.float64)
            )

    @property
    def n_params(self) -> int:
        n = 0
        if self.weight is not None:
            n += self.weight.size
        if self.bias is not None:
            n += self.bias.size
        return n

    def out_shape(self, in_shape: tuple) -> tuple:
        if self.kind == "conv":
            o, c, kh, kw = self.weight.shape
            if len(in_shape) != 3 or in_shape[0] != c:
                raise ShapeMismatch(
                    f"conv {self.name or ''} expects ({c},H,W), got {in_shape}"
                )
            sh, sw = self.stride
            return (
                o,
                kernels.conv_out_size(in_shape[1], kh, sh),
                kernels.conv_out_size(in_shape[2], kw, sw),
            )
        if self.kind == "linear":
            o, i = self.weight.shape
            if in_shape != (i,):
                raise ShapeMismatch(
                    f"linear {self.name or ''} expects ({i},), got {in_shape}"
                )
            return (o,)
        if self.kind == "flatten":
            return (int(np.prod(in_shape)),)
        if self.kind == "add":
            if in_shape[0] % 2:
                raise ShapeMismatch("add layer needs an even leading extent")
            return (in_shape[0] // 2,) + tuple(in_shape[1:])
        if self.kind == "softmax" and len(in_shape) != 1:
            raise ShapeMismatch("softmax expects a flat vector")
        return in_shape


@dataclass
class NetGraph:
    """A straight-line network with explicitly set weights and named taps."""

    layers: list
    input_shape: tuple
    taps: dict = field(default_factory=dict)

    def __post_init__(self):
        self.input_shape = tuple(self.input_shape)
        shape = self.input_shape
        self._shapes = [shape]
        for k, layer in enumerate(self.layers):
            try:
                shape = layer.out_shape(shape)
            except ShapeMismatch as exc:
                raise ShapeMismatch(f"layer {k}: {exc}") from None
            self._shapes.append(shape)
        for label, idx in self.taps.items():
            if not 0 <= idx < len(self.layers):
                raise ShapeMismatch(f"tap {label!r} references layer {idx}")

    @property
    def output_shape(self) -> tuple:
        return self._shapes[-1]

    def shape_after(self, layer_index: int) -> tuple:
        return self._shapes[layer_index + 1]

    @property
    def n_params(self) -> int:
        return sum(layer.n_params for layer in self.layers)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def tap_index(self, label: str) -> int:
        if label not in self.taps:
            known = ", ".join(sorted(self.taps)) or "(none)"
            raise ShapeMismatch(f"unknown tap {label!r}; available: {known}")
        return self.taps[label]


@dataclass
class ActivationTrace:
    """Per-layer inputs and outputs recorded during one forward pass."""

    inputs: list
    outputs: list
    batched: bool

    def __len__(self):
        return len(self.inputs)


def _as_batch(x, shape, what):
    x = np.asarray(x, dtype=np.float64)
    if x.shape == tuple(shape):
        return x[None], False
    if x.ndim == len(shape) + 1 and x.shape[1:] == tuple(shape):
        return x, True
    raise ShapeMismatch(f"{what} shape {x.shape} does not match {tuple(shape)}")


def _layer_forward(layer: Layer, x: np.ndarray) -> np.ndarray:
    if layer.kind == "conv":
        return kernels.conv2d_forward(x, layer.weight, layer.bias, layer.stride)
    if layer.kind == "linear":
        return kernels.linear_forward(x, layer.weight, layer.bias)
    if layer.kind == "relu":
        return np.maximum(x, 0.0)
    if layer.kind == "softmax":
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=-1, keepdims=True)
    if layer.kind == "flatten":
        return np.ascontiguousarray(x).reshape(x.shape[0], -1)
    if layer.kind == "add":
        half = x.shape[1] // 2
        return x[:, :half] + x[:, half:]
    raise AssertionError(layer.kind)


def _layer_input_grad(layer, x, y, g, in_shape):
    if layer.kind == "conv":
        return kernels.conv2d_input_grad(g, layer.weight, layer.stride, in_shape[2:])
    if layer.kind == "linear":
        return kernels.linear_input_grad(g, layer.weight)
    if layer.kind == "relu":
        # subgradient 0 at exactly 0 keeps off-gates silent
        return g * (x > 0.0)
    if layer.kind == "softmax":
        dot = (g * y).sum(axis=-1, keepdims=True)
        return y * (g - dot)
    if layer.kind == "flatten":
        return g.reshape(x.shape)
    if layer.kind == "add":
        return np.concatenate([g, g], axis=1)
    raise AssertionError(layer.kind)


def forward(net: NetGraph, x) -> tuple:
    """Run ``x`` through every layer; returns (output, trace)."""
    xb, batched = _as_batch(x, net.input_shape, "input")
    inputs, outputs = [], []
    cur = xb
    for layer in net.layers:
        inputs.append(cur)
        cur = _layer_forward(layer, cur)
        outputs.append(cur)
    y = cur if batched else cur[0]
    return y, ActivationTrace(inputs=inputs, outputs=outputs, batched=batched)


def backward(net: NetGraph, trace: ActivationTrace, seed) -> np.ndarray:
    """d<seed, output>/d input for the forward pass recorded in ``trace``."""
    return backward_to(net, trace, seed, -1)


def backward_to(net: NetGraph, trace: ActivationTrace, seed, layer_index: int):
    """Like :func:`backward` but stops at the *output* of ``layer_index``.

    ``layer_index=-1`` propagates all the way to the network input. Used by
    methods that attribute onto an intermediate activation.
    """
    if len(trace) != len(net.layers):
        raise ShapeMismatch("trace does not match this net")
    n_batch = trace.inputs[0].shape[0]
    g, seed_batched = _as_batch(seed, net.output_shape, "seed")
    if seed_batched and g.shape[0] != n_batch:
        raise ShapeMismatch("seed batch does not match trace batch")
    if not seed_batched and n_batch != 1:
        g = np.broadcast_to(g, (n_batch,) + g.shape[1:]).copy()
    stop = layer_index if layer_index >= 0 else -1
    for k in range(len(net.layers) - 1, stop, -1):
        layer = net.layers[k]
        g = _layer_input_grad(
            layer,
            trace.inputs[k],
            trace.outputs[k],
            g,
            (n_batch,) + net._shapes[k],
        )
    return g if trace.batched else g[0]
