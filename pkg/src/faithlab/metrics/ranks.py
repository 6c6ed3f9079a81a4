"""Method rankings across metrics and their rank correlation with the
ground-truth-based ranking."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from faithlab.errors import ConfigError
from faithlab.metrics.stats import _average_ranks, spearman


@dataclass
class RankTable:
    methods: list
    rankings: dict  # metric name -> rank per method (0 = best)
    correlations: dict = field(default_factory=dict)  # metric -> rho vs gt

    def as_rows(self):
        header = ["method"] + list(self.rankings)
        rows = [header]
        for i, m in enumerate(self.methods):
            rows.append([m] + [self.rankings[k][i] for k in self.rankings])
        return rows


def _rank_desc(values) -> np.ndarray:
    """Rank 0 = largest value; ties share the average rank."""
    v = np.asarray(values, dtype=np.float64)
    return _average_ranks(-v)


def build_rank_table(per_method: dict, gt_metric: str = "gt_f1") -> RankTable:
    """``per_method`` maps method name to a dict of metric values. Metrics
    named ``*deletion*`` rank ascending (lower is better); everything else
    descending. Spearman correlations compare each metric's ranking against
    the ground-truth one."""
    methods = sorted(per_method)
    if len(methods) < 3:
        raise ConfigError("rank table needs at least 3 methods")
    metric_names = sorted({k for v in per_method.values() for k in v})
    if gt_metric not in metric_names:
        raise ConfigError(f"missing ground-truth metric {gt_metric!r}")
    rankings = {}
    for name in metric_names:
        vals = np.array([per_method[m][name] for m in methods], dtype=np.float64)
        if "deletion" in name:
            vals = -vals
        rankings[name] = _rank_desc(vals)
    correlations = {
        name: (
            1.0
            if name == gt_metric
            else float(spearman(rankings[gt_metric], rankings[name]))
        )
        for name in metric_names
    }
    return RankTable(methods=methods, rankings=rankings, correlations=correlations)
