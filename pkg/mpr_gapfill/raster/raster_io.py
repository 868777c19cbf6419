#!/usr/bin/env python3
"""
Raster I/O Module

Reads and writes the ASCII grid dialect used for inputs and outputs:

    ncols 4
    nrows 3
    NODATA_value -9999.0
    <nrows lines of ncols whitespace-separated values>

Files written here use shortest round-trip float formatting, so reading and
rewriting one of them reproduces it byte for byte. The reader also accepts
xllcorner/yllcorner/xllcenter/yllcenter/cellsize header lines and ignores them.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..exceptions import RasterFormatError, RasterIOError
from ..grid.grid_field import GridField
from ..grid.temperature_field import TemperatureField
from ..utils.file_utils import ensure_parent_dir

# Get logger
logger = logging.getLogger('mpr_gapfill')

DEFAULT_NODATA = -9999.0
_HEADER_KEYS = {'ncols', 'nrows', 'nodata_value'}
_IGNORED_KEYS = {'xllcorner', 'yllcorner', 'xllcenter', 'yllcenter', 'cellsize', 'dx', 'dy'}


@dataclass
class RasterFile:
    """Header plus row-major values; cells equal to ``nodata`` are MISSING."""

    ncols: int
    nrows: int
    nodata: Optional[float]
    values: np.ndarray

    def to_grid(self) -> GridField:
        if self.nodata is None:
            return GridField(self.values)
        mask = self.values != self.nodata
        return GridField(np.where(mask, self.values, 0.0), mask)

    @classmethod
    def from_grid(cls, grid: GridField, path: str = '<grid>') -> 'RasterFile':
        nodata = choose_nodata(grid.sample_values(), path)
        return cls(grid.width, grid.height, nodata, grid.filled(nodata))


def choose_nodata(samples: np.ndarray, path: str = '<grid>') -> float:
    """-9999.0 unless the data reaches it; then -99999.0, -999999.0, ... below the data minimum."""
    nodata = DEFAULT_NODATA
    if samples.size:
        lowest = float(samples.min())
        while nodata >= lowest:
            nodata = nodata * 10 - 9
            if not np.isfinite(nodata):
                raise _format_error(f"No finite NODATA value below the data minimum {lowest!r}",
                                    "RASTER_SENTINEL", path)
    return nodata


def _format_error(message: str, error_class: str, path: str, line: Optional[int] = None) -> RasterFormatError:
    return RasterFormatError(message, error_class, str(path), line)


def read_raster(path: str) -> RasterFile:
    try:
        with open(path, 'r') as f:
            lines = f.read().splitlines()
    except FileNotFoundError as e:
        raise RasterIOError(f"Raster file not found: {path}", error_class="IO_NOT_FOUND") from e
    except OSError as e:
        raise RasterIOError(f"Cannot read raster {path}: {e}", error_class="IO_NOT_FOUND") from e

    header = {}
    body_start = 0
    for i, line in enumerate(lines):
        tokens = line.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        if key not in _HEADER_KEYS and key not in _IGNORED_KEYS:
            body_start = i
            break
        if len(tokens) != 2:
            raise _format_error(f"header line must be '<key> <value>', got {line!r}", "RASTER_HEADER", path, i + 1)
        if key in _IGNORED_KEYS:
            continue
        header[key] = (tokens[1], i + 1)
    else:
        body_start = len(lines)

    for key in ('ncols', 'nrows'):
        if key not in header:
            raise _format_error(f"missing '{key}' header", "RASTER_HEADER", path, 1)
    dims = {}
    for key in ('ncols', 'nrows'):
        text, line_no = header[key]
        try:
            dims[key] = int(text)
        except ValueError:
            raise _format_error(f"{key} must be an integer, got {text!r}", "RASTER_HEADER", path, line_no) from None
        if dims[key] < 1:
            raise _format_error(f"{key} must be positive, got {dims[key]}", "RASTER_HEADER", path, line_no)
    nodata = None
    if 'nodata_value' in header:
        text, line_no = header['nodata_value']
        try:
            nodata = float(text)
        except ValueError:
            raise _format_error(f"NODATA_value must be a number, got {text!r}", "RASTER_HEADER",
                                path, line_no) from None

    ncols, nrows = dims['ncols'], dims['nrows']
    body = lines[body_start:]
    tokens = ' '.join(body).split()
    expected = ncols * nrows
    if len(tokens) != expected:
        raise _format_error(f"expected {expected} values ({nrows} rows x {ncols} cols), found {len(tokens)}",
                            "RASTER_COUNT", path, len(lines))
    try:
        values = np.array(tokens, dtype=np.float64)
    except ValueError:
        values = None
    if values is None or not np.all(np.isfinite(values)):
        # Slow path to report the offending line
        for offset, line in enumerate(body):
            for token in line.split():
                try:
                    ok = np.isfinite(float(token))
                except ValueError:
                    ok = False
                if not ok:
                    raise _format_error(f"invalid value {token!r}", "RASTER_VALUE", path, body_start + offset + 1)
    values = values.reshape(nrows, ncols)

    if nodata is not None:
        data = values[values != nodata]
        if data.size and data.min() < nodata < data.max():
            raise _format_error(f"NODATA_value {nodata!r} lies inside the data range "
                                f"[{data.min()!r}, {data.max()!r}]", "RASTER_SENTINEL", path,
                                header['nodata_value'][1])
    return RasterFile(ncols, nrows, nodata, values)


def load_raster(path: str) -> GridField:
    """Read a raster; NODATA cells become MISSING."""
    grid = read_raster(path).to_grid()
    logger.debug(f"Loaded {path}: {grid}")
    return grid


def _raster_text(raster: RasterFile) -> str:
    lines = [f"ncols {raster.ncols}", f"nrows {raster.nrows}", f"NODATA_value {raster.nodata!r}"]
    for row in raster.values:
        lines.append(' '.join(repr(float(v)) for v in row))
    return '\n'.join(lines) + '\n'


def write_raster(data: Union[GridField, TemperatureField], path: str) -> None:
    """Write a grid (MISSING as NODATA) or a temperature field in canonical form."""
    grid = data.to_grid() if isinstance(data, TemperatureField) else data
    raster = RasterFile.from_grid(grid, path)
    try:
        ensure_parent_dir(path)
        with open(path, 'w') as f:
            f.write(_raster_text(raster))
    except OSError as e:
        raise RasterIOError(f"Cannot write raster {path}: {e}", error_class="IO_WRITE_FAILED") from e
    logger.debug(f"Wrote {raster.nrows}x{raster.ncols} raster to {path}")


def write_trace(trace, path: str, sample_energy: Optional[float] = None) -> None:
    """Per-sweep grid energy and acceptance ratio, one sweep per line."""
    lines = []
    if sample_energy is not None:
        lines.append(f"# sample_energy {sample_energy!r}")
    lines.append("sweep,energy,acceptance")
    for i, (energy, ratio) in enumerate(zip(trace.energies, trace.acceptance), start=1):
        lines.append(f"{i},{energy!r},{ratio!r}")
    try:
        ensure_parent_dir(path)
        with open(path, 'w') as f:
            f.write('\n'.join(lines) + '\n')
    except OSError as e:
        raise RasterIOError(f"Cannot write trace {path}: {e}", error_class="IO_WRITE_FAILED") from e
