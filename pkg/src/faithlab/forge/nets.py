"""Assembly of the two designed networks, with named taps.

Single-color: white gate -> accumulator -> flatten -> modulo head.
The scalar output equals (#white pixels) mod N for every valid image.

Multi-color: color detector -> accumulator -> flatten -> identity MLP head
-> softmax. Pre-softmax logit i equals the exact pixel count of target
color i whenever the image contains only target/background colors.
"""

import numpy as np

from faithlab.forge.accumulator import build_accumulator
from faithlab.forge.configs import MultiColorConfig, SingleColorConfig
from faithlab.forge.detector import build_color_detector, build_white_gate
from faithlab.forge.modulo import modulo_layers
from faithlab.graph import Layer, NetGraph


def _tapped(layers, input_shape, aliases):
    taps = {layer.name: k for k, layer in enumerate(layers) if layer.name}
    taps.update(aliases)
    return NetGraph(layers, input_shape=input_shape, taps=taps)


def build_single_color_net(cfg: SingleColorConfig) -> NetGraph:
    rng = np.random.default_rng(cfg.seed)
    layers = list(build_white_gate())
    gate_out = len(layers) - 1
    layers += build_accumulator(cfg.mode, cfg.height, cfg.width, 1, rng)
    acc_out = len(layers) - 1
    layers.append(Layer("flatten", name="flatten"))
    layers += modulo_layers(cfg.modulus, cfg.capacity)
    aliases = {
        "gate.out": gate_out,
        "accumulator.out": acc_out,
        "count": acc_out,
        "output": len(layers) - 1,
    }
    return _tapped(layers, (1, cfg.height, cfg.width), aliases)


def build_multi_color_net(cfg: MultiColorConfig) -> NetGraph:
    rng = np.random.default_rng(cfg.seed)
    nc = cfg.n_classes
    layers = list(build_color_detector(cfg))
    det_out = len(layers) - 1
    layers += build_accumulator(
        cfg.mode,
        cfg.height,
        cfg.width,
        nc,
        rng,
        n_redundant=cfg.n_redundant,
        redundant_scale=cfg.redundant_scale,
    )
    acc_out = len(layers) - 1
    layers.append(Layer("flatten", name="flatten"))
    layers.append(
        Layer("linear", np.eye(nc), np.zeros(nc), name="head.layers.0")
    )
    layers.append(Layer("softmax", name="probs"))
    aliases = {
        "detector.out": det_out,
        "accumulator.out": acc_out,
        "logits": len(layers) - 2,
    }
    return _tapped(layers, (3, cfg.height, cfg.width), aliases)


def default_gradcam_tap(net: NetGraph) -> str:
    """Deepest accumulator entry whose activation keeps a spatial extent of
    at least 2x2; mirrors the mid-stack taps used at full scale while
    staying meaningful for small images."""
    best = None
    for label, idx in net.taps.items():
        if not label.startswith("accumulator.layers."):
            continue
        shape = net.shape_after(idx)
        if len(shape) == 3 and shape[1] >= 2 and shape[2] >= 2:
            if best is None or idx > best[1]:
                best = (label, idx)
    if best is None:
        raise ValueError("net has no spatial accumulator tap")
    return best[0]
