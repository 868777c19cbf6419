#!/usr/bin/env python3
"""
IDW Interpolator Module

This module provides the inverse-distance-weighted baseline:
1. idw_predict - fill MISSING sites from the samples within a search radius
2. min_full_coverage_radius - the smallest radius that leaves no site without samples
"""

import math
import time
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from colorama import Fore, Style
from scipy import ndimage
from scipy.spatial import cKDTree

from ..exceptions import ConfigError, IdwCoverageError
from ..grid.grid_field import GridField

# Get logger
logger = logging.getLogger('mpr_gapfill')

# Sites are on an integer lattice, so no distance lies in (R, R + RADIUS_SLACK]
RADIUS_SLACK = 1e-9
MAX_PAIRS_PER_BATCH = 4_000_000


class NoNeighborPolicy(Enum):
    ERROR = 'error'
    NEAREST_FALLBACK = 'nearest'


@dataclass(frozen=True)
class IdwParams:
    power: float = 2.0
    radius: float = 8.0
    policy: NoNeighborPolicy = NoNeighborPolicy.NEAREST_FALLBACK

    def __post_init__(self):
        if not self.power > 0:
            raise ConfigError(f"IDW power must be positive, got {self.power}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigError(f"IDW radius must be positive and finite, got {self.radius}")


@dataclass
class IdwResult:
    grid: GridField
    fallback_count: int
    runtime_seconds: float

    def diagnostics(self) -> dict:
        return {'fallback_count': self.fallback_count, 'runtime_seconds': self.runtime_seconds}


def _site_coords(mask: np.ndarray) -> np.ndarray:
    return np.argwhere(mask).astype(np.float64)


def idw_predict(grid: GridField, params: IdwParams, threads: int = 1) -> IdwResult:
    """
    Predict every MISSING site as the w = d^-beta weighted mean of the samples within R.

    Args:
        grid: Input grid with at least one SAMPLE site
        params: Power, radius and empty-disc policy
        threads: Workers for the nearest-sample queries

    Returns:
        IdwResult with the filled grid and the number of nearest-sample fallbacks
    """
    start_time = time.time()
    grid.require_samples(1)
    if grid.is_complete():
        return IdwResult(grid, 0, time.time() - start_time)

    sample_coords = _site_coords(grid.mask)
    missing_coords = _site_coords(~grid.mask)
    values = grid.sample_values()
    # Weighted sums of offsets from the sample minimum
    base = float(values.min())
    offsets = values - base

    sample_tree = cKDTree(sample_coords)
    n_missing = missing_coords.shape[0]
    numerators = np.zeros(n_missing)
    denominators = np.zeros(n_missing)

    disc_area = max(1, int(math.ceil(math.pi * (params.radius + 1) ** 2)))
    batch_size = max(1, MAX_PAIRS_PER_BATCH // disc_area)
    for start in range(0, n_missing, batch_size):
        stop = min(start + batch_size, n_missing)
        query_tree = cKDTree(missing_coords[start:stop])
        pairs = query_tree.sparse_distance_matrix(sample_tree, params.radius + RADIUS_SLACK, output_type='ndarray')
        if pairs.size == 0:
            continue
        weights = pairs['v'] ** -params.power
        numerators[start:stop] = np.bincount(pairs['i'], weights=weights * offsets[pairs['j']],
                                             minlength=stop - start)
        denominators[start:stop] = np.bincount(pairs['i'], weights=weights, minlength=stop - start)

    covered = denominators > 0
    predictions = np.empty(n_missing)
    predictions[covered] = base + numerators[covered] / denominators[covered]

    empty = np.nonzero(~covered)[0]
    if empty.size:
        if params.policy is NoNeighborPolicy.ERROR:
            raise IdwCoverageError(missing_coords[empty].astype(int), params.radius)
        _, nearest = sample_tree.query(missing_coords[empty], k=1, workers=threads)
        predictions[empty] = values[nearest]
        logger.warning(f"{Fore.YELLOW}{empty.size} sites have no sample within R={params.radius}; "
                       f"used the nearest sample{Style.RESET_ALL}")

    np.clip(predictions, values.min(), values.max(), out=predictions)
    filled = grid.with_values(~grid.mask, predictions)
    runtime = time.time() - start_time
    logger.debug(f"IDW filled {n_missing} sites in {runtime:.2f}s (beta={params.power}, R={params.radius})")
    return IdwResult(filled, int(empty.size), runtime)


def min_full_coverage_radius(grid: GridField) -> float:
    """Largest distance from a MISSING site to its nearest sample (0 for a complete grid)."""
    grid.require_samples(1)
    if grid.is_complete():
        return 0.0
    distances = ndimage.distance_transform_edt(~grid.mask)
    return float(distances[~grid.mask].max())
