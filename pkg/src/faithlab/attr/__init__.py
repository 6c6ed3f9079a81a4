"""Attribution methods under test.

Every method consumes (net, sample, target, hyper-parameters) and produces
an :class:`AttributionMap`; ground truth is never an input. ``METHODS``
maps public method names to their callables and declared signedness
(methods that cannot emit negative scores are marked ``signed=False`` and
are scored as incapable on the negative ground-truth variant).
"""

from dataclasses import dataclass
from typing import Callable

from faithlab.attr.controls import control_constant, control_random
from faithlab.attr.gradient import (
    deeplift_rescale,
    gradcam,
    guided_backprop,
    integrated_gradients,
    lrp_epsilon,
    saliency,
)
from faithlab.attr.lime import lime
from faithlab.attr.maps import (
    AttributionMap,
    BaselineSpec,
    color_baseline,
    fingerprint,
    scalar_baseline,
)
from faithlab.attr.perturbation import extremal_perturbation, occlusion
from faithlab.attr.segmentation import (
    Segmentation,
    segment_felzenszwalb,
    segment_grid,
)


@dataclass(frozen=True)
class MethodInfo:
    fn: Callable
    signed: bool


METHODS = {
    "saliency": MethodInfo(saliency, signed=False),
    "guided-backprop": MethodInfo(guided_backprop, signed=False),
    "integrated-gradients": MethodInfo(integrated_gradients, signed=True),
    "gradcam": MethodInfo(gradcam, signed=False),
    "deeplift-rescale": MethodInfo(deeplift_rescale, signed=True),
    "lrp-epsilon": MethodInfo(lrp_epsilon, signed=True),
    "occlusion": MethodInfo(occlusion, signed=True),
    "extremal-perturbation": MethodInfo(extremal_perturbation, signed=False),
    "lime": MethodInfo(lime, signed=True),
    "random": MethodInfo(control_random, signed=False),
    "constant": MethodInfo(control_constant, signed=False),
}

__all__ = [
    "AttributionMap",
    "BaselineSpec",
    "METHODS",
    "MethodInfo",
    "Segmentation",
    "color_baseline",
    "control_constant",
    "control_random",
    "deeplift_rescale",
    "extremal_perturbation",
    "fingerprint",
    "gradcam",
    "guided_backprop",
    "integrated_gradients",
    "lime",
    "lrp_epsilon",
    "occlusion",
    "saliency",
    "scalar_baseline",
    "segment_felzenszwalb",
    "segment_grid",
]
