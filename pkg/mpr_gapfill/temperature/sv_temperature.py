#!/usr/bin/env python3
"""
Spatially varying temperatures.

Block-specific temperatures (BST) come from matching the sample energy of each
l_b x l_b block against the calibration curve; site-specific temperatures
(SST) smooth the resulting step field with repeated disc averages.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from colorama import Fore, Style
from scipy import ndimage

from ..calibration.calibration_curve import CalibrationCurve, estimate_temperature
from ..exceptions import ConfigError, NoSampleBondsError
from ..grid.grid_field import AngleField, BlockDecomposition
from ..grid.temperature_field import TemperatureField, TemperatureProvenance
from ..model.mpr_model import BondEnergyStats, MprParams

# Get logger
logger = logging.getLogger('mpr_gapfill')

_BOND_SLICES = (
    ((slice(None), slice(None, -1)), (slice(None), slice(1, None))),
    ((slice(None, -1), slice(None)), (slice(1, None), slice(None))),
)


@dataclass(frozen=True)
class BlockTemperatureStats:
    """Per-block sample energies and, once assigned, temperatures.

    ``energies`` is NaN for blocks without sample-sample bonds. ``fallback``
    marks blocks whose temperature is the median of the others.
    """

    decomposition: BlockDecomposition
    energies: np.ndarray
    n_bonds: np.ndarray
    temperatures: Optional[np.ndarray] = None
    fallback: Optional[np.ndarray] = None
    clamped: Optional[np.ndarray] = None
    all_empty: bool = False

    @property
    def has_temperatures(self) -> bool:
        return self.temperatures is not None

    def block_energy(self, block: int) -> BondEnergyStats:
        n = int(self.n_bonds[block])
        return BondEnergyStats(float(self.energies[block]) if n else None, n)

    def summary(self) -> dict:
        if not self.has_temperatures:
            return {'n_blocks': self.decomposition.n_blocks}
        return {
            'n_blocks': self.decomposition.n_blocks,
            'mean_temperature': float(np.mean(self.temperatures)),
            'min_temperature': float(np.min(self.temperatures)),
            'max_temperature': float(np.max(self.temperatures)),
            'fallback_blocks': int(np.count_nonzero(self.fallback)),
            'clamped_blocks': int(np.count_nonzero(self.clamped)),
            'all_empty': self.all_empty,
        }


def block_sample_energies(angles: AngleField, decomposition: BlockDecomposition,
                          params: MprParams) -> BlockTemperatureStats:
    """Sample specific energy of every block over FIXED-FIXED bonds inside it.

    Bonds whose endpoints lie in different blocks count for neither block.
    """
    if decomposition.shape != angles.shape:
        raise ConfigError(f"Block decomposition shape {decomposition.shape} does not match grid {angles.shape}")
    index = decomposition.block_index
    fixed = angles.fixed
    blocks, cosines = [], []
    for first, second in _BOND_SLICES:
        inside = fixed[first] & fixed[second] & (index[first] == index[second])
        blocks.append(index[first][inside])
        cosines.append(np.cos(params.q * (angles.angles[first] - angles.angles[second]))[inside])
    blocks = np.concatenate(blocks)
    cosines = np.concatenate(cosines)

    n_blocks = decomposition.n_blocks
    sums = np.bincount(blocks, weights=cosines, minlength=n_blocks)
    n_bonds = np.bincount(blocks, minlength=n_blocks)
    energies = np.full(n_blocks, np.nan)
    has_bonds = n_bonds > 0
    energies[has_bonds] = -sums[has_bonds] / n_bonds[has_bonds]
    logger.debug(f"{int(np.count_nonzero(has_bonds))} of {n_blocks} blocks have sample-sample bonds")
    return BlockTemperatureStats(decomposition, energies, n_bonds)


def lower_median(values: np.ndarray) -> float:
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    return float(ordered[(ordered.size - 1) // 2])


def assign_block_temperatures(stats: BlockTemperatureStats, curve: CalibrationCurve,
                              global_temperature: Optional[float] = None) -> BlockTemperatureStats:
    """
    Match every block energy against the curve.

    Args:
        stats: Output of block_sample_energies
        curve: Calibration curve
        global_temperature: Uniform temperature used when no block has bonds

    Returns:
        A copy of ``stats`` with temperatures, fallback and clamp flags
    """
    n_blocks = stats.decomposition.n_blocks
    has_bonds = stats.n_bonds > 0
    temperatures = np.empty(n_blocks)
    clamped = np.zeros(n_blocks, dtype=bool)

    for block in np.nonzero(has_bonds)[0]:
        estimate = estimate_temperature(float(stats.energies[block]), curve)
        temperatures[block] = estimate.temperature
        clamped[block] = estimate.clamped

    fallback = ~has_bonds
    all_empty = not has_bonds.any()
    if all_empty:
        if global_temperature is None:
            raise NoSampleBondsError("No block has sample-sample bonds and no global temperature is available")
        logger.warning(f"{Fore.YELLOW}No block has sample-sample bonds; using the global temperature "
                       f"{global_temperature:.6g} everywhere{Style.RESET_ALL}")
        temperatures[:] = global_temperature
    elif fallback.any():
        median = lower_median(temperatures[has_bonds])
        temperatures[fallback] = median
        logger.info(f"{int(np.count_nonzero(fallback))} blocks without sample bonds use the median "
                    f"temperature {median:.6g}")

    if clamped.any():
        logger.debug(f"{int(np.count_nonzero(clamped))} block temperatures clamped to the curve range")
    return replace(stats, temperatures=temperatures, fallback=fallback, clamped=clamped, all_empty=all_empty)


def expand_to_sites(stats: BlockTemperatureStats) -> TemperatureField:
    """Step field holding each block's temperature on all of its sites."""
    if not stats.has_temperatures:
        raise ConfigError("Block temperatures have not been assigned")
    decomposition = stats.decomposition
    return TemperatureField(decomposition.expand(stats.temperatures),
                            TemperatureProvenance('bst', block_size=decomposition.block_size))


def disc_kernel(radius: float) -> np.ndarray:
    """Sites within Euclidean distance ``radius`` of the center, center included."""
    reach = int(math.floor(radius))
    dy, dx = np.mgrid[-reach:reach + 1, -reach:reach + 1]
    return (dy * dy + dx * dx <= radius * radius).astype(np.float64)


def smooth_temperatures(field: TemperatureField, r_s: float, n_s: int) -> TemperatureField:
    """
    Replace each site by the mean over its disc of radius r_s, n_s times.

    The disc is clipped at the grid edge and the mean is over the sites it
    actually covers.
    """
    if not r_s >= 1:
        raise ConfigError(f"Smoothing radius r_s must be at least 1, got {r_s}")
    if n_s < 0:
        raise ConfigError(f"Smoothing passes n_s must be non-negative, got {n_s}")

    values = np.array(field.values, dtype=np.float64)
    lowest, highest = float(values.min()), float(values.max())
    kernel = disc_kernel(r_s)
    coverage = ndimage.correlate(np.ones_like(values), kernel, mode='constant', cval=0.0)
    for _ in range(n_s):
        values = ndimage.correlate(values, kernel, mode='constant', cval=0.0) / coverage
        # Stay within the input range
        np.clip(values, lowest, highest, out=values)

    provenance = TemperatureProvenance('sst', block_size=field.provenance.block_size,
                                       smoothing_radius=float(r_s), smoothing_passes=int(n_s))
    return TemperatureField(values, provenance)
