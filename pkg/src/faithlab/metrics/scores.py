"""Ground-truth overlap scores and the gamma faithfulness test.

Soft precision and recall over a feature set with attributions a_j and
binary ground truth g_j:

    Pr = sum |a_j * g_j| / sum |a_j|        Re = sum |a_j * g_j| / sum |g_j|

Attribution maps are normalized to [-1, 1] first (positives by the max
positive, negatives by the magnitude of the min negative) so recall stays
in [0, 1]. For the signed variants only the matching-sign attributions
enter, both in the numerator and the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from faithlab.attr.maps import AttributionMap
from faithlab.data.generate import gt_mask
from faithlab.errors import ShapeMismatch

SMOOTH_RADIUS_DEFAULT = 1


def normalize_attribution(values: np.ndarray) -> np.ndarray:
    """Scale positives by the max positive and negatives by |min negative|.

    Idempotent; all-zero maps pass through unchanged.
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.isfinite(values).all():
        raise ShapeMismatch("attribution map contains non-finite values")
    out = values.copy()
    pos_max = out[out > 0].max() if (out > 0).any() else 0.0
    neg_min = out[out < 0].min() if (out < 0).any() else 0.0
    if pos_max > 0:
        out[out > 0] /= pos_max
    if neg_min < 0:
        out[out < 0] /= -neg_min
    return out


@dataclass
class ScoreTriple:
    precision: float
    recall: float
    f1: float
    variant: str
    method: str = ""
    flags: tuple = ()


@dataclass
class FaithfulnessVerdict:
    gamma: float
    f1: float
    passed: bool


def _f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if (p + r) > 0 else 0.0


def score(
    amap: AttributionMap,
    sample,
    variant: str,
    smooth_radius: int = SMOOTH_RADIUS_DEFAULT,
) -> ScoreTriple:
    """Soft precision/recall/F1 of one map against one ground-truth variant.

    Methods declared unable to produce negative scores are marked
    ``incapable`` on the negative variant and scored 0 there.
    """
    g = gt_mask(sample, variant, radius=smooth_radius)
    if g.shape != amap.values.shape:
        raise ShapeMismatch(
            f"map shape {amap.values.shape} does not match gt {g.shape}"
        )
    flags = []
    if variant == "negative" and not amap.signed:
        return ScoreTriple(0.0, 0.0, 0.0, variant, amap.method, ("incapable",))
    a = normalize_attribution(amap.values)
    if variant in ("positive", "smoothed-positive"):
        a = np.where(a > 0, a, 0.0)
    elif variant == "negative":
        a = np.where(a < 0, -a, 0.0)
    else:
        a = np.abs(a)
    overlap = np.abs(a * g).sum()
    denom_a = np.abs(a).sum()
    denom_g = np.abs(g).sum()
    precision = overlap / denom_a if denom_a > 0 else 0.0
    if denom_a == 0:
        flags.append("empty-attribution")
    recall = overlap / denom_g if denom_g > 0 else 0.0
    if denom_g == 0:
        flags.append("empty-gt")
    return ScoreTriple(
        float(precision), float(recall), _f1(precision, recall),
        variant, amap.method, tuple(flags),
    )


def faithfulness_test(triple: ScoreTriple, gamma: float = 0.5) -> FaithfulnessVerdict:
    """Pass iff F1 >= gamma (boundary inclusive)."""
    return FaithfulnessVerdict(gamma=gamma, f1=triple.f1, passed=triple.f1 >= gamma)
