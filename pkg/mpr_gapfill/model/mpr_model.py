#!/usr/bin/env python3
"""
MPR Model Module

Energy functions of the modified planar rotator:
1. bond_energy - the pair interaction -J cos(q (phi_i - phi_j))
2. sample_specific_energy - mean bond cosine over sample-sample bonds
3. grid_specific_energy - the same over every bond of the grid

Specific energies are reported per unit coupling, so they lie in
[-1, -cos(2*pi*q)] whatever J is.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import ConfigError
from ..grid.grid_field import AngleField, bond_count

# Get logger
logger = logging.getLogger('mpr_gapfill')


@dataclass(frozen=True)
class MprParams:
    """Coupling J, modification q and reduced temperature T of the MPR model."""

    coupling: float = 1.0
    q: float = 0.5
    temperature: float = 0.0

    def __post_init__(self):
        if not self.coupling > 0:
            raise ConfigError(f"Coupling J must be positive, got {self.coupling}")
        if not 0 < self.q <= 0.5:
            raise ConfigError(f"Modification q must be in (0, 1/2], got {self.q}")
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ConfigError(f"Temperature must be finite and non-negative, got {self.temperature}")

    @property
    def max_bond_energy(self) -> float:
        return -self.coupling * math.cos(2.0 * math.pi * self.q)


@dataclass(frozen=True)
class BondEnergyStats:
    """Specific energy over a set of bonds; ``energy`` is None when there are no bonds."""

    energy: Optional[float]
    n_bonds: int

    @property
    def has_bonds(self) -> bool:
        return self.n_bonds > 0


def bond_energy(phi_i, phi_j, params: MprParams):
    """Energy of one bond (works elementwise on arrays)."""
    return -params.coupling * np.cos(params.q * (np.asarray(phi_i) - np.asarray(phi_j)))


def bond_cosines(angles: np.ndarray, q: float, include: Optional[np.ndarray] = None) -> np.ndarray:
    """cos(q*dphi) of every bond whose two endpoints are selected by ``include``.

    Horizontal bonds come first, then vertical ones, each in row-major order,
    so the reduction order is fixed for a given grid.
    """
    parts = []
    for first, second in (((slice(None), slice(None, -1)), (slice(None), slice(1, None))),
                          ((slice(None, -1), slice(None)), (slice(1, None), slice(None)))):
        cosines = np.cos(q * (angles[first] - angles[second]))
        if include is None:
            parts.append(cosines.ravel())
        else:
            parts.append(cosines[include[first] & include[second]])
    return np.concatenate(parts)


def sample_specific_energy(angles: AngleField, params: MprParams) -> BondEnergyStats:
    """Specific energy over FIXED-FIXED bonds, each unordered bond counted once."""
    cosines = bond_cosines(angles.angles, params.q, angles.fixed)
    if cosines.size == 0:
        logger.debug("No sample-sample bonds; sample specific energy undefined")
        return BondEnergyStats(None, 0)
    # numpy sums contiguous float arrays pairwise in a fixed order
    return BondEnergyStats(-float(np.sum(cosines)) / cosines.size, int(cosines.size))


def grid_specific_energy(angles: AngleField, params: MprParams) -> float:
    """Specific energy over every nearest-neighbour bond of the grid."""
    n_bonds = bond_count(angles.shape)
    if n_bonds == 0:
        return 0.0
    cosines = bond_cosines(angles.angles, params.q)
    return -float(np.sum(cosines)) / n_bonds


def independent_angle_energy(q: float = 0.5) -> float:
    """Expected specific energy of independent uniform angles in [0, 2*pi]."""
    # E[cos(q (x - y))] for x, y ~ U(0, 2*pi) is 2 (1 - cos(2*pi*q)) / (2*pi*q)^2
    a = 2.0 * math.pi * q
    return -2.0 * (1.0 - math.cos(a)) / (a * a)
