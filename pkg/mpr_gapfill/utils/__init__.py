"""
Utility functions for the MPR gap-filling package.
"""

from .logging_utils import ColoredFormatter, SweepDetailFilter, setup_logging
from .file_utils import ensure_output_dir, ensure_parent_dir, memory_usage_mb

__all__ = ['ColoredFormatter', 'SweepDetailFilter', 'setup_logging',
           'ensure_output_dir', 'ensure_parent_dir', 'memory_usage_mb']
