#!/usr/bin/env python3
"""
Exception types for the MPR gap-filling package.

Every error carries a machine-parseable ``error_class`` so the CLI can print a
single ``error: <CLASS>: <message>`` line and validation reports can record
which realization failed and why.
"""

from typing import Any, Dict, Optional


class GapFillError(Exception):
    """Base class for all package errors."""

    error_class = "INTERNAL"

    def __init__(self, message: str, error_class: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        if error_class is not None:
            self.error_class = error_class
        self.details = details or {}


class ConfigError(GapFillError, ValueError):
    error_class = "CONFIG_INVALID"


class DegenerateRangeError(GapFillError, ValueError):
    """Raised when all sample values are equal (z_max == z_min)."""

    error_class = "DEGENERATE_RANGE"

    def __init__(self, value: float):
        super().__init__(f"Sample values span a degenerate range (all equal to {value!r})",
                         details={'value': value})
        self.value = value


class NoSamplesError(GapFillError, ValueError):
    error_class = "NO_SAMPLES"


class NoSampleBondsError(GapFillError):
    error_class = "NO_SAMPLE_BONDS"


class MissingValueAccessError(GapFillError, LookupError):
    error_class = "MISSING_VALUE_READ"


class SiteIndexError(GapFillError, IndexError):
    error_class = "SITE_OUT_OF_RANGE"


class NegativeTemperatureError(GapFillError, ValueError):
    error_class = "NEGATIVE_TEMPERATURE"


class IdwCoverageError(GapFillError):
    """Raised by the ERROR policy when prediction sites have no sample in the search disc."""

    error_class = "IDW_EMPTY_DISC"

    def __init__(self, sites, radius: float):
        sites = [tuple(int(v) for v in s) for s in sites]
        preview = ', '.join(str(s) for s in sites[:10])
        more = f" (+{len(sites) - 10} more)" if len(sites) > 10 else ""
        super().__init__(f"{len(sites)} prediction sites have no sample within R={radius}: {preview}{more}",
                         details={'sites': sites, 'radius': radius})
        self.sites = sites


class ScoringError(GapFillError):
    error_class = "SCORE_MISSING_PREDICTION"


class RasterFormatError(GapFillError):
    """Malformed raster input; ``line`` is 1-based."""

    def __init__(self, message: str, error_class: str, path: str, line: Optional[int] = None):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}", error_class=error_class,
                         details={'path': path, 'line': line})
        self.path = path
        self.line = line


class RasterIOError(GapFillError):
    error_class = "IO_NOT_FOUND"


class CalibrationCacheError(GapFillError):
    error_class = "CALIBRATION_CACHE"
