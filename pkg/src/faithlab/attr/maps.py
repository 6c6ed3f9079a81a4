"""Attribution map containers, baselines, and config fingerprints."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from faithlab.errors import ConfigError

TRUE_BASELINE = "true-baseline"
DEFAULT_ZERO = "default-zero"
CUSTOM = "custom"


def fingerprint(method: str, params: dict) -> str:
    """Stable 16-hex digest of a method's full hyper-parameter set."""
    blob = json.dumps({"method": method, **params}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class BaselineSpec:
    """Replacement value standing for 'feature absent'."""

    mode: str  # "color" | "scalar"
    value: Union[Tuple, float]
    provenance: str = CUSTOM

    def __post_init__(self):
        if self.mode == "color":
            v = tuple(float(x) for x in self.value)
            if len(v) != 3 or any(not 0 <= x <= 255 for x in v):
                raise ConfigError(f"baseline color must be an RGB triple, got {v}")
            object.__setattr__(self, "value", v)
        elif self.mode == "scalar":
            object.__setattr__(self, "value", float(self.value))
        else:
            raise ConfigError(f"baseline mode must be color|scalar, got {self.mode!r}")

    def image(self, shape: tuple) -> np.ndarray:
        """Full baseline image of the given (C, H, W) shape."""
        c = shape[0]
        out = np.empty(shape, dtype=np.float64)
        if self.mode == "scalar":
            out[:] = self.value
        else:
            if c != 3:
                raise ConfigError("color baseline needs a 3-channel image")
            out[:] = np.asarray(self.value)[:, None, None]
        return out

    def fill(self) -> np.ndarray:
        if self.mode == "scalar":
            return np.array([self.value])
        return np.asarray(self.value, dtype=np.float64)

    def key(self) -> dict:
        return {"mode": self.mode, "value": self.value, "provenance": self.provenance}


def scalar_baseline(v: float, provenance=CUSTOM) -> BaselineSpec:
    return BaselineSpec("scalar", v, provenance)


def color_baseline(rgb, provenance=CUSTOM) -> BaselineSpec:
    return BaselineSpec("color", tuple(rgb), provenance)


@dataclass
class AttributionMap:
    """Per-pixel relevance scores for one (method, sample) cell."""

    values: np.ndarray  # (H, W) float64
    method: str
    fingerprint: str
    target: Union[int, str]  # class index, or "scalar" for scalar outputs
    signed: bool = True
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ConfigError("attribution values must be a 2-D map")
        if not np.isfinite(self.values).all():
            raise ConfigError(f"{self.method}: non-finite attribution values")
