"""Configuration records for the two designed environments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from faithlab.errors import ConfigError

UNIFORM = "uniform"
NONUNIFORM = "nonuniform"

DEFAULT_BACKGROUND = (20, 20, 20)
DEFAULT_COLORS = (
    (255, 0, 0),
    (0, 255, 0),
    (0, 0, 255),
    (255, 255, 0),
)


def _check_mode(mode: str):
    if mode not in (UNIFORM, NONUNIFORM):
        raise ConfigError(f"accumulator mode must be uniform|nonuniform, got {mode!r}")


def _check_color(c, what):
    if len(c) != 3 or any(not (0 <= int(v) <= 255) for v in c):
        raise ConfigError(f"{what} must be an RGB triple of 8-bit ints, got {c!r}")
    return tuple(int(v) for v in c)


@dataclass(frozen=True)
class SingleColorConfig:
    """White-pixel counting environment: scalar output = count mod N."""

    height: int = 64
    width: int = 64
    modulus: int = 30
    capacity: int = 0  # 0 means height*width
    mode: str = NONUNIFORM
    seed: int = 0

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ConfigError("height/width must be positive")
        if self.modulus < 2:
            raise ConfigError(f"modulus must be >= 2, got {self.modulus}")
        if self.capacity == 0:
            object.__setattr__(self, "capacity", self.height * self.width)
        if self.capacity < self.height * self.width:
            raise ConfigError(
                f"capacity {self.capacity} below pixel count "
                f"{self.height * self.width}"
            )
        _check_mode(self.mode)


@dataclass(frozen=True)
class MultiColorConfig:
    """Dominant-color classification environment with optional redundant
    detector channels wired randomly into the accumulator (scaled by
    ``redundant_scale``; 0 disables the unseen-data behaviour entirely)."""

    height: int = 64
    width: int = 64
    colors: Tuple = DEFAULT_COLORS
    background: Tuple = DEFAULT_BACKGROUND
    n_redundant: int = 4
    redundant_scale: float = 1.0
    mode: str = NONUNIFORM
    seed: int = 0

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ConfigError("height/width must be positive")
        colors = tuple(_check_color(c, "target color") for c in self.colors)
        background = _check_color(self.background, "background color")
        if len(set(colors)) != len(colors):
            raise ConfigError("target colors must be pairwise distinct")
        if background in colors:
            raise ConfigError("background must differ from every target color")
        if not colors:
            raise ConfigError("at least one target color is required")
        if self.n_redundant < 0:
            raise ConfigError("n_redundant must be >= 0")
        if self.redundant_scale < 0:
            raise ConfigError("redundant_scale must be >= 0")
        _check_mode(self.mode)
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "background", background)

    @property
    def n_classes(self) -> int:
        return len(self.colors)
