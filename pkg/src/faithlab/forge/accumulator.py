"""CNN accumulators: stacks of stride==kernel convolutions that sum a map.

Uniform mode uses all-ones kernels. Non-uniform mode replaces each stage by
a pair (K random kernels followed by a 1x1 mixing layer) whose weights
satisfy, for every kernel position j, sum_i w_ij * m_i = 1 exactly, so the
pair still sums its window. Redundant input channels, when present, enter
the first stage through fixed pseudo-random weights scaled by
``redundant_scale``.
"""

import numpy as np

from faithlab.errors import ConfigError
from faithlab.forge.configs import NONUNIFORM, UNIFORM
from faithlab.graph import Layer

MAX_KERNEL = 7
_SOLVE_RETRIES = 50


def kernel_schedule(extent: int) -> list:
    """Greedy factorization into kernel sizes <= 7 (largest factors first)."""
    factors = []
    n = extent
    while n > 1:
        for k in range(MAX_KERNEL, 1, -1):
            if n % k == 0:
                factors.append(k)
                n //= k
                break
        else:
            raise ConfigError(
                f"extent {extent} has a prime factor > {MAX_KERNEL}; "
                f"cannot tile it with stride==kernel stages (stuck at {n})"
            )
    return factors


def _stage_plan(h: int, w: int) -> list:
    sh, sw = kernel_schedule(h), kernel_schedule(w)
    while len(sh) < len(sw):
        sh.append(1)
    while len(sw) < len(sh):
        sw.append(1)
    return list(zip(sh, sw))


def _solve_mixing(kerns: np.ndarray) -> np.ndarray:
    """Least-norm m with sum_i kerns[i, j] * m_i == 1 for all positions j."""
    a = kerns.T  # (positions, kernels)
    ones = np.ones(a.shape[0])
    m, *_ = np.linalg.lstsq(a, ones, rcond=None)
    if np.max(np.abs(a @ m - ones)) > 1e-9:
        raise np.linalg.LinAlgError("inconsistent mixing system")
    return m


def build_accumulator(
    mode: str,
    h: int,
    w: int,
    channels: int,
    rng,
    n_redundant: int = 0,
    redundant_scale: float = 0.0,
    name: str = "accumulator",
) -> list:
    """Layers mapping (channels + n_redundant, h, w) to per-channel sums
    of shape (channels, 1, 1). ``rng`` drives the non-uniform kernels and
    the redundant connections."""
    plan = _stage_plan(h, w)
    layers = []
    cur_h, cur_w = h, w
    entry = 0

    def add(layer_kind, weight=None, bias=None, stride=None):
        nonlocal entry
        layers.append(
            Layer(layer_kind, weight, bias, stride=stride,
                  name=f"{name}.layers.{entry}")
        )
        entry += 1

    for stage, (kh, kw) in enumerate(plan):
        in_extra = n_redundant if stage == 0 else 0
        in_ch = channels + in_extra
        if mode == UNIFORM:
            wt = np.zeros((channels, in_ch, kh, kw))
            for i in range(channels):
                wt[i, i] = 1.0
            if in_extra:
                wt[:, channels:] = redundant_scale * rng.uniform(
                    -1.0, 1.0, size=(channels, in_extra, kh, kw)
                )
            add("conv", wt, np.zeros(channels), stride=(kh, kw))
            add("relu")
        elif mode == NONUNIFORM:
            k = kh * kw
            wt = np.zeros((channels * k, in_ch, kh, kw))
            mix = np.zeros((channels, channels * k, 1, 1))
            for i in range(channels):
                for attempt in range(_SOLVE_RETRIES):
                    kerns = rng.uniform(0.5, 1.5, size=(k, kh * kw))
                    try:
                        m = _solve_mixing(kerns)
                        break
                    except np.linalg.LinAlgError:
                        continue
                else:
                    raise ConfigError(
                        f"could not solve mixing weights for stage {stage}"
                    )
                wt[i * k : (i + 1) * k, i] = kerns.reshape(k, kh, kw)
                mix[i, i * k : (i + 1) * k, 0, 0] = m
            if in_extra:
                wt[:, channels:] = redundant_scale * rng.uniform(
                    -1.0, 1.0, size=(channels * k, in_extra, kh, kw)
                )
            add("conv", wt, np.zeros(channels * k), stride=(kh, kw))
            add("relu")
            add("conv", mix, np.zeros(channels), stride=(1, 1))
            add("relu")
        else:
            raise ConfigError(f"unknown accumulator mode {mode!r}")
        cur_h = (cur_h - kh) // kh + 1
        cur_w = (cur_w - kw) // kw + 1
    if not plan and n_redundant:
        raise ConfigError("1x1 input cannot absorb redundant channels")
    return layers
