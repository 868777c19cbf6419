#!/usr/bin/env python3
"""
Heatmap images of grids and temperature fields (PGM/PPM via Pillow).
"""

import logging
from typing import Optional, Union

import numpy as np
from PIL import Image

from ..exceptions import ConfigError, RasterIOError
from ..grid.grid_field import GridField
from ..grid.temperature_field import TemperatureField
from ..utils.file_utils import ensure_parent_dir

# Get logger
logger = logging.getLogger('mpr_gapfill')

SCALES = ('gray', 'heat')
# Gray level 0 and pure blue never occur in the ramps
MISSING_GRAY = 0
MISSING_RGB = (0, 0, 255)


def normalized_levels(grid: GridField, clip_percentile: Optional[float] = None) -> np.ndarray:
    """Sample values mapped linearly to [0, 1]; values above the clip percentile saturate."""
    samples = grid.sample_values()
    if clip_percentile is not None and not 0 < clip_percentile <= 100:
        raise ConfigError(f"Clip percentile must be in (0, 100], got {clip_percentile}")
    levels = np.zeros(grid.shape)
    if samples.size == 0:
        return levels
    low = float(samples.min())
    high = float(np.percentile(samples, clip_percentile)) if clip_percentile is not None else float(samples.max())
    if high > low:
        levels = np.clip((grid.filled(low) - low) / (high - low), 0.0, 1.0)
    return levels


def heat_ramp(levels: np.ndarray) -> np.ndarray:
    """Black -> red -> yellow -> white."""
    scaled = 3.0 * levels
    rgb = np.stack([np.clip(scaled, 0, 1), np.clip(scaled - 1, 0, 1), np.clip(scaled - 2, 0, 1)], axis=-1)
    return np.round(rgb * 255).astype(np.uint8)


def emit_heatmap(data: Union[GridField, TemperatureField], path: str, scale: str = 'heat',
                 clip_percentile: Optional[float] = None) -> None:
    """
    Save a grid as a binary PGM ('gray') or PPM ('heat') image.

    Args:
        data: Grid or temperature field
        path: Output image path
        scale: 'gray' or 'heat'
        clip_percentile: Upper clip percentile of the color scale (None for the maximum)
    """
    if scale not in SCALES:
        raise ConfigError(f"Unknown color scale {scale!r}; expected one of {SCALES}")
    grid = data.to_grid() if isinstance(data, TemperatureField) else data
    levels = normalized_levels(grid, clip_percentile)
    missing = ~grid.mask

    if scale == 'gray':
        pixels = (1 + np.round(levels * 254)).astype(np.uint8)
        pixels[missing] = MISSING_GRAY
    else:
        pixels = heat_ramp(levels)
        pixels[missing] = MISSING_RGB

    try:
        ensure_parent_dir(path)
        Image.fromarray(pixels).save(path, format='PPM')
    except OSError as e:
        raise RasterIOError(f"Cannot write heatmap {path}: {e}", error_class="IO_WRITE_FAILED") from e
    logger.debug(f"Wrote {scale} heatmap {path}")
