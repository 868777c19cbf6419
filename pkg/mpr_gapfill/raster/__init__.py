"""
ASCII grid raster I/O and heatmap output.
"""

from .heatmap import emit_heatmap
from .raster_io import RasterFile, choose_nodata, load_raster, read_raster, write_raster, write_trace

__all__ = ['RasterFile', 'choose_nodata', 'emit_heatmap', 'load_raster', 'read_raster', 'write_raster',
           'write_trace']
