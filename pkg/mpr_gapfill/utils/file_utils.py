#!/usr/bin/env python3
"""
File utility functions for the MPR gap-filling package.
"""

import os
import logging
from pathlib import Path

import psutil

from ..exceptions import RasterIOError

# Get logger
logger = logging.getLogger('mpr_gapfill')

def ensure_output_dir(output_dir: str) -> str:
    """
    Ensure the output directory exists and is writable.

    Args:
        output_dir: Requested output directory path

    Returns:
        Validated output directory path
    """
    path = Path(output_dir).expanduser()

    try:
        path.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Using output directory: {path}")

        # Test if directory is writable
        test_file = path / '.write_test'
        test_file.write_text('test')
        test_file.unlink()
    except OSError as e:
        raise RasterIOError(f"Output directory {path} is not writable: {e}",
                            error_class="IO_WRITE_FAILED") from e

    return str(path)


def ensure_parent_dir(file_path: str) -> str:
    """Create the parent directory of ``file_path`` when it is missing."""
    parent = os.path.dirname(os.path.abspath(file_path))
    ensure_output_dir(parent)
    return file_path


def memory_usage_mb() -> float:
    """Resident memory of the current process in MB."""
    process = psutil.Process()
    return process.memory_info().rss / 1024 / 1024
