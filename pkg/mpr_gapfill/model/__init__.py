"""
Energy functions of the modified planar rotator (MPR) model.
"""

from .mpr_model import (
    BondEnergyStats,
    MprParams,
    bond_cosines,
    bond_energy,
    grid_specific_energy,
    independent_angle_energy,
    sample_specific_energy,
)

__all__ = ['BondEnergyStats', 'MprParams', 'bond_cosines', 'bond_energy', 'grid_specific_energy',
           'independent_angle_energy', 'sample_specific_energy']
