"""Builders that compile hand-set weights into NetGraphs, plus verification.

Every network here computes an exactly known integer function of its input
(pixel counts, modulo values, color indicators), so the relevance of every
input pixel is known by construction rather than learned.
"""

from faithlab.forge.accumulator import build_accumulator, kernel_schedule
from faithlab.forge.bundle import load_bundle, save_bundle
from faithlab.forge.configs import MultiColorConfig, SingleColorConfig
from faithlab.forge.detector import build_color_detector, build_white_gate
from faithlab.forge.gates import build_eq_gate, build_gt_gate
from faithlab.forge.modulo import build_modulo_head
from faithlab.forge.nets import (
    build_multi_color_net,
    build_single_color_net,
    default_gradcam_tap,
)
from faithlab.forge.verify import VerificationReport, verify_net

__all__ = [
    "build_accumulator",
    "build_color_detector",
    "build_eq_gate",
    "build_gt_gate",
    "build_modulo_head",
    "build_multi_color_net",
    "build_single_color_net",
    "build_white_gate",
    "default_gradcam_tap",
    "kernel_schedule",
    "load_bundle",
    "save_bundle",
    "MultiColorConfig",
    "SingleColorConfig",
    "VerificationReport",
    "verify_net",
]
