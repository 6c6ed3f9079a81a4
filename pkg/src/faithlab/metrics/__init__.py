"""Scoring of attribution maps: ground-truth overlap, the gamma
faithfulness test, perturbation curves (standard and modulo-adapted), and
rank-correlation analysis."""

from faithlab.metrics.curves import (
    CurveResult,
    adapted_insertion_deletion,
    insertion_deletion,
    oracle_adapted_auc,
    sensitivity_n,
)
from faithlab.metrics.ranks import RankTable, build_rank_table
from faithlab.metrics.scores import (
    FaithfulnessVerdict,
    ScoreTriple,
    faithfulness_test,
    normalize_attribution,
    score,
)
from faithlab.metrics.stats import pearson, safe_pearson, spearman

__all__ = [
    "CurveResult",
    "FaithfulnessVerdict",
    "RankTable",
    "ScoreTriple",
    "adapted_insertion_deletion",
    "build_rank_table",
    "faithfulness_test",
    "insertion_deletion",
    "normalize_attribution",
    "oracle_adapted_auc",
    "pearson",
    "safe_pearson",
    "score",
    "sensitivity_n",
    "spearman",
]
