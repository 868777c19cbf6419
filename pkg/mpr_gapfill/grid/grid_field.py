#!/usr/bin/env python3
"""
Grid Field Module

This module provides the grid data model used throughout the package:
1. GridField - a raster of observed values with an explicit SAMPLE/MISSING mask
2. AngleField - the spin-angle image of a GridField with its FIXED/FREE mask
3. BlockDecomposition - the l_b x l_b tiling used for block temperatures
4. Lattice helpers (open-boundary neighbours, checkerboard parity) and the
   linear value <-> angle transform
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from ..exceptions import ConfigError, DegenerateRangeError, MissingValueAccessError, NoSamplesError, SiteIndexError

# Get logger
logger = logging.getLogger('mpr_gapfill')

TWO_PI = 2.0 * math.pi

Site = Tuple[int, int]
Shape = Tuple[int, int]


class Color(Enum):
    """Checkerboard sub-lattice of a site."""

    A = 0
    B = 1


class GridField:
    """Rectangular raster of values with a SAMPLE (True) / MISSING (False) mask.

    Values under MISSING sites are not part of the data. They are stored as
    zeros, are never exposed through the numeric accessors and reading one
    through ``value_at`` raises ``MissingValueAccessError``.
    """

    def __init__(self, values, mask=None):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ConfigError(f"Grid values must be a non-empty 2-D array, got shape {values.shape}")
        if mask is None:
            mask = np.ones(values.shape, dtype=bool)
        else:
            mask = np.array(mask, dtype=bool)
            if mask.shape != values.shape:
                raise ConfigError(f"Mask shape {mask.shape} does not match values shape {values.shape}")

        if not np.all(np.isfinite(values[mask])):
            raise ConfigError("Sample values must be finite")
        values[~mask] = 0.0

        values.setflags(write=False)
        mask.setflags(write=False)
        self._values = values
        self._mask = mask

    @classmethod
    def from_masked(cls, masked: np.ma.MaskedArray) -> 'GridField':
        """Build a grid from a numpy masked array (masked entries become MISSING)."""
        data = np.ma.getdata(masked)
        missing = np.ma.getmaskarray(masked)
        return cls(np.where(missing, 0.0, data), ~missing)

    @property
    def shape(self) -> Shape:
        return self._values.shape

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def width(self) -> int:
        return self._values.shape[1]

    @property
    def mask(self) -> np.ndarray:
        """Read-only boolean array, True at SAMPLE sites."""
        return self._mask

    @property
    def n_samples(self) -> int:
        return int(np.count_nonzero(self._mask))

    @property
    def n_missing(self) -> int:
        return self._mask.size - self.n_samples

    def is_complete(self) -> bool:
        return self.n_missing == 0

    def value_at(self, site: Site) -> float:
        row, col = check_site(site, self.shape)
        if not self._mask[row, col]:
            raise MissingValueAccessError(f"Site {(row, col)} is MISSING and has no value")
        return float(self._values[row, col])

    def sample_values(self) -> np.ndarray:
        """Values at SAMPLE sites in row-major order."""
        return self._values[self._mask]

    def as_masked(self) -> np.ma.MaskedArray:
        return np.ma.MaskedArray(self._values.copy(), mask=~self._mask)

    def to_array(self) -> np.ndarray:
        """Dense copy of the values; only defined when no site is MISSING."""
        if not self.is_complete():
            raise MissingValueAccessError(f"Grid has {self.n_missing} MISSING sites; use as_masked() instead")
        return self._values.copy()

    def filled(self, fill_value: float) -> np.ndarray:
        """Dense copy with MISSING sites replaced by ``fill_value`` (for export only)."""
        out = self._values.copy()
        out[~self._mask] = fill_value
        return out

    def with_values(self, sites_mask: np.ndarray, new_values: np.ndarray) -> 'GridField':
        """Return a copy with the sites selected by ``sites_mask`` set and marked SAMPLE."""
        values = self._values.copy()
        mask = self._mask.copy()
        values[sites_mask] = new_values
        mask[sites_mask] = True
        return GridField(values, mask)

    def without_sites(self, sites_mask: np.ndarray) -> 'GridField':
        """Return a copy with the selected sites turned MISSING (their values are dropped)."""
        mask = self._mask & ~sites_mask
        return GridField(np.where(mask, self._values, 0.0), mask)

    def require_samples(self, minimum: int = 2) -> None:
        if self.n_samples < minimum:
            raise NoSamplesError(f"Grid has {self.n_samples} SAMPLE sites, at least {minimum} required")

    def neighbors(self, site: Site) -> List[Site]:
        return neighbors(site, self.shape)

    def __eq__(self, other):
        if not isinstance(other, GridField):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self._mask, other._mask)
                and np.array_equal(self._values, other._values))

    def __repr__(self):
        return f"GridField({self.height}x{self.width}, samples={self.n_samples}, missing={self.n_missing})"


@dataclass(frozen=True)
class TransformParams:
    """Linear map between data units and spin angles in [0, 2*pi]."""

    z_min: float
    z_max: float

    @classmethod
    def from_grid(cls, grid: GridField) -> 'TransformParams':
        samples = grid.sample_values()
        if samples.size == 0:
            raise NoSamplesError("Cannot derive a value range from a grid without samples")
        return cls(float(samples.min()), float(samples.max()))

    @property
    def is_degenerate(self) -> bool:
        return not self.z_max > self.z_min

    def check(self) -> None:
        if self.is_degenerate:
            raise DegenerateRangeError(self.z_min)


class AngleField:
    """Spin angles with a FIXED (True) / FREE (False) mask.

    The arrays are owned by the field and mutated in place by the simulation
    engine; FIXED angles are never written after construction.
    """

    def __init__(self, angles, fixed):
        self.angles = np.array(angles, dtype=np.float64)
        self.fixed = np.array(fixed, dtype=bool)
        if self.angles.ndim != 2 or self.angles.shape != self.fixed.shape:
            raise ConfigError(f"Angle and mask shapes differ: {self.angles.shape} vs {self.fixed.shape}")

    @property
    def shape(self) -> Shape:
        return self.angles.shape

    @property
    def height(self) -> int:
        return self.angles.shape[0]

    @property
    def width(self) -> int:
        return self.angles.shape[1]

    @property
    def free(self) -> np.ndarray:
        return ~self.fixed

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero(~self.fixed))

    def copy(self) -> 'AngleField':
        return AngleField(self.angles.copy(), self.fixed.copy())

    def __repr__(self):
        return f"AngleField({self.height}x{self.width}, free={self.n_free})"


@dataclass(frozen=True)
class BlockDecomposition:
    """Row-major l_b x l_b tiling; edge blocks are truncated when l_b does not divide the grid."""

    block_size: int
    blocks_x: int
    blocks_y: int
    block_index: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.blocks_x * self.blocks_y

    @property
    def shape(self) -> Shape:
        return self.block_index.shape

    def block_of(self, site: Site) -> int:
        row, col = check_site(site, self.shape)
        return int(self.block_index[row, col])

    def site_counts(self) -> np.ndarray:
        return np.bincount(self.block_index.ravel(), minlength=self.n_blocks)

    def block_widths(self) -> List[int]:
        width = self.shape[1]
        return [min(self.block_size, width - bx * self.block_size) for bx in range(self.blocks_x)]

    def block_heights(self) -> List[int]:
        height = self.shape[0]
        return [min(self.block_size, height - by * self.block_size) for by in range(self.blocks_y)]

    def expand(self, per_block: np.ndarray) -> np.ndarray:
        """Broadcast one value per block to a per-site array."""
        per_block = np.asarray(per_block)
        if per_block.shape != (self.n_blocks,):
            raise ConfigError(f"Expected {self.n_blocks} block values, got shape {per_block.shape}")
        return per_block[self.block_index]


def check_site(site: Site, shape: Shape) -> Site:
    row, col = int(site[0]), int(site[1])
    if not (0 <= row < shape[0] and 0 <= col < shape[1]):
        raise SiteIndexError(f"Site {(row, col)} is outside the {shape[0]}x{shape[1]} grid")
    return row, col


def neighbors(site: Site, shape: Shape) -> List[Site]:
    """Up/down/left/right neighbours of a site with open (non-periodic) boundaries."""
    row, col = check_site(site, shape)
    height, width = shape
    result = []
    if row > 0:
        result.append((row - 1, col))
    if row < height - 1:
        result.append((row + 1, col))
    if col > 0:
        result.append((row, col - 1))
    if col < width - 1:
        result.append((row, col + 1))
    return result


def checkerboard_parity(site: Site) -> Color:
    row, col = int(site[0]), int(site[1])
    return Color.A if (row + col) % 2 == 0 else Color.B


def color_mask(shape: Shape, color: Color) -> np.ndarray:
    """Boolean array selecting the sites of one checkerboard color."""
    rows, cols = np.indices(shape)
    return (rows + cols) % 2 == color.value


def bond_count(shape: Shape) -> int:
    """Number of nearest-neighbour bonds of an open-boundary grid."""
    height, width = shape
    return 2 * height * width - height - width


def to_angles(grid: GridField, params: TransformParams) -> AngleField:
    """Map SAMPLE values to FIXED angles; FREE angles are left at zero for the initializer."""
    params.check()
    scale = TWO_PI / (params.z_max - params.z_min)
    angles = np.zeros(grid.shape, dtype=np.float64)
    mask = grid.mask
    angles[mask] = (grid.sample_values() - params.z_min) * scale
    # Clamp to [0, 2*pi]
    np.clip(angles, 0.0, TWO_PI, out=angles)
    return AngleField(angles, mask.copy())


def angles_to_values(angles: np.ndarray, params: TransformParams) -> np.ndarray:
    return params.z_min + (params.z_max - params.z_min) * (angles / TWO_PI)


def from_angles(angles: AngleField, params: TransformParams) -> GridField:
    """Back-transform every angle to data units; the result has no MISSING sites."""
    return GridField(angles_to_values(angles.angles, params))


def make_blocks(shape: Shape, block_size: int) -> BlockDecomposition:
    if block_size < 2:
        raise ConfigError(f"Block size l_b must be at least 2, got {block_size}")
    height, width = shape
    blocks_x = -(-width // block_size)
    blocks_y = -(-height // block_size)
    rows, cols = np.indices(shape)
    block_index = (rows // block_size) * blocks_x + cols // block_size
    block_index.setflags(write=False)
    if block_size >= max(height, width):
        logger.debug(f"Block size {block_size} covers the whole {height}x{width} grid; single block")
    return BlockDecomposition(block_size, blocks_x, blocks_y, block_index)


def row_bands(height: int, n_bands: int) -> List[Tuple[int, int]]:
    """Split ``range(height)`` into at most ``n_bands`` contiguous row bands."""
    n_bands = max(1, min(n_bands, height))
    edges = np.linspace(0, height, n_bands + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
