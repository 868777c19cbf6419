#!/usr/bin/env python3
"""
Synthetic heterogeneous test fields.

Each regime gets white noise smoothed by a moving-average window of its
correlation length, standardized over the regime area and scaled to the
regime's mean and standard deviation.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import ndimage

from ..exceptions import ConfigError
from ..grid.grid_field import GridField
from ..simulation.counter_rng import STREAM_SYNTHETIC, counter_generator

# Get logger
logger = logging.getLogger('mpr_gapfill')


class RegimeLayout(Enum):
    SINGLE = 'single'
    HALVES = 'halves'
    QUADRANTS = 'quadrants'

    @property
    def n_regimes(self) -> int:
        return {RegimeLayout.SINGLE: 1, RegimeLayout.HALVES: 2, RegimeLayout.QUADRANTS: 4}[self]


@dataclass(frozen=True)
class Regime:
    mean: float = 0.0
    std: float = 1.0
    corr_len: int = 8


@dataclass(frozen=True)
class SyntheticFieldSpec:
    """Size, regime layout and per-regime statistics of a synthetic field.

    HALVES puts regime 0 on the left half; QUADRANTS numbers the quadrants
    row-major starting top-left.
    """

    size: int = 256
    layout: RegimeLayout = RegimeLayout.HALVES
    regimes: Tuple[Regime, ...] = (Regime(-20.0, 0.1, 16), Regime(0.0, 10.0, 4))
    seed: int = 0

    def __post_init__(self):
        if self.size < 2:
            raise ConfigError(f"Synthetic field size must be at least 2, got {self.size}")
        if len(self.regimes) != self.layout.n_regimes:
            raise ConfigError(f"Layout {self.layout.value} needs {self.layout.n_regimes} regimes, "
                              f"got {len(self.regimes)}")
        for regime in self.regimes:
            if not regime.std >= 0:
                raise ConfigError(f"Regime std must be non-negative, got {regime.std}")
            if regime.corr_len < 1:
                raise ConfigError(f"Regime correlation length must be at least 1, got {regime.corr_len}")

    @classmethod
    def two_regime(cls, size: int = 256, seed: int = 0) -> 'SyntheticFieldSpec':
        """Smooth low-variance left half next to a rough high-variance right half."""
        return cls(size, RegimeLayout.HALVES, (Regime(-20.0, 0.1, 16), Regime(0.0, 10.0, 4)), seed)

    @classmethod
    def single(cls, size: int = 256, mean: float = 0.0, std: float = 1.0, corr_len: int = 8,
               seed: int = 0) -> 'SyntheticFieldSpec':
        return cls(size, RegimeLayout.SINGLE, (Regime(mean, std, corr_len),), seed)


def regime_labels(size: int, layout: RegimeLayout) -> np.ndarray:
    rows, cols = np.indices((size, size))
    half = size // 2
    if layout is RegimeLayout.SINGLE:
        return np.zeros((size, size), dtype=int)
    if layout is RegimeLayout.HALVES:
        return (cols >= half).astype(int)
    return (rows >= half).astype(int) * 2 + (cols >= half).astype(int)


def generate_synthetic_field(spec: SyntheticFieldSpec) -> GridField:
    """Fully sampled piecewise-stationary random field; deterministic per seed."""
    shape = (spec.size, spec.size)
    labels = regime_labels(spec.size, spec.layout)
    values = np.empty(shape)
    for k, regime in enumerate(spec.regimes):
        region = labels == k
        if regime.std == 0:
            values[region] = regime.mean
            continue
        noise = counter_generator(spec.seed, STREAM_SYNTHETIC, k).standard_normal(shape)
        smooth = ndimage.uniform_filter(noise, size=regime.corr_len, mode='reflect')[region]
        spread = smooth.std()
        standardized = (smooth - smooth.mean()) / spread if spread > 0 else np.zeros_like(smooth)
        values[region] = regime.mean + regime.std * standardized
    logger.debug(f"Generated {spec.size}x{spec.size} synthetic field ({spec.layout.value}, seed {spec.seed})")
    return GridField(values)
