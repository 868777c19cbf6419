#!/usr/bin/env python3
"""
Per-site reduced temperature map used by the conditional simulation.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import ConfigError, NegativeTemperatureError
from .grid_field import GridField, Shape


@dataclass(frozen=True)
class TemperatureProvenance:
    """How a temperature field was produced: 'uniform', 'bst' or 'sst'."""

    kind: str = 'uniform'
    block_size: Optional[int] = None
    smoothing_radius: Optional[float] = None
    smoothing_passes: Optional[int] = None

    def label(self) -> str:
        if self.kind == 'bst':
            return f"BST({self.block_size})"
        if self.kind == 'sst':
            return f"SST({self.block_size}, {self.smoothing_radius}, {self.smoothing_passes})"
        return "UNIFORM"


class TemperatureField:
    """Finite, non-negative temperature at every site, tagged with its provenance."""

    def __init__(self, values, provenance: Optional[TemperatureProvenance] = None):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise ConfigError(f"Temperature field must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigError("Temperature field contains non-finite values")
        if values.size and values.min() < 0:
            raise NegativeTemperatureError(f"Temperature field has negative values (min {values.min()})")
        values.setflags(write=False)
        self.values = values
        self.provenance = provenance or TemperatureProvenance()

    @classmethod
    def uniform(cls, shape: Shape, temperature: float) -> 'TemperatureField':
        return cls(np.full(shape, float(temperature)), TemperatureProvenance('uniform'))

    @property
    def shape(self) -> Shape:
        return self.values.shape

    def summary(self) -> dict:
        return {
            'provenance': self.provenance.label(),
            'min': float(self.values.min()),
            'max': float(self.values.max()),
            'mean': float(self.values.mean()),
        }

    def to_grid(self) -> GridField:
        """View the field as a fully sampled raster for export."""
        return GridField(self.values)

    def __repr__(self):
        return f"TemperatureField({self.shape[0]}x{self.shape[1]}, {self.provenance.label()})"
