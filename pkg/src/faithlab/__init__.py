"""faithlab: a controlled environment for testing feature-attribution faithfulness.

The package builds neural networks whose weights are set by hand (never
trained), generates synthetic images with exactly known per-pixel relevance,
runs a suite of attribution methods, and scores each method against the
known ground truth as well as against perturbation-based metrics.
"""

__version__ = "0.1.0"

from faithlab.graph import ActivationTrace, Layer, NetGraph, backward, forward
from faithlab.rules import modified_backward

__all__ = [
    "ActivationTrace",
    "Layer",
    "NetGraph",
    "backward",
    "forward",
    "modified_backward",
    "__version__",
]
