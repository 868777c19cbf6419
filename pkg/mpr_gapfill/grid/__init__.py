"""
Grid data model, lattice topology, the value <-> angle transform and
per-site temperature fields.
"""

from .grid_field import (
    TWO_PI,
    AngleField,
    BlockDecomposition,
    Color,
    GridField,
    TransformParams,
    bond_count,
    checkerboard_parity,
    color_mask,
    from_angles,
    make_blocks,
    neighbors,
    to_angles,
)
from .temperature_field import TemperatureField, TemperatureProvenance

__all__ = ['TWO_PI', 'AngleField', 'BlockDecomposition', 'Color', 'GridField', 'TemperatureField',
           'TemperatureProvenance', 'TransformParams', 'bond_count', 'checkerboard_parity',
           'color_mask', 'from_angles', 'make_blocks', 'neighbors', 'to_angles']
