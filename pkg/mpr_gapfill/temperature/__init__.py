"""
Block-specific (BST) and site-specific (SST) temperature fields.
"""

from ..grid.temperature_field import TemperatureField, TemperatureProvenance
from .sv_temperature import (
    BlockTemperatureStats,
    assign_block_temperatures,
    block_sample_energies,
    disc_kernel,
    expand_to_sites,
    lower_median,
    smooth_temperatures,
)

__all__ = ['BlockTemperatureStats', 'TemperatureField', 'TemperatureProvenance', 'assign_block_temperatures',
           'block_sample_energies', 'disc_kernel', 'expand_to_sites', 'lower_median', 'smooth_temperatures']
