"""Correlation statistics."""

import numpy as np

from faithlab.errors import ConfigError


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ConfigError("pearson needs two equal-length vectors")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        raise ZeroDivisionError("zero-variance input to pearson")
    return float((xc * yc).sum() / denom)


def safe_pearson(x, y):
    """(rho, ok). Zero-variance inputs give (0.0, False)."""
    try:
        return pearson(x, y), True
    except ZeroDivisionError:
        return 0.0, False


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v))
    sv = v[order]
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Rank correlation with average-rank tie handling."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ConfigError("spearman needs two equal-length vectors")
    return pearson(_average_ranks(a), _average_ranks(b))
