#!/usr/bin/env python3
"""
Logging utility functions for the MPR gap-filling package.
"""

import logging
import colorama
from colorama import Fore, Style

# Initialize colorama for cross-platform colored terminal output
colorama.init(autoreset=True)

class ColoredFormatter(logging.Formatter):
    """Custom formatter for colored log messages"""

    COLORS = {
        'DEBUG': Fore.BLUE,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.RED + Style.BRIGHT
    }

    def format(self, record):
        log_message = super().format(record)
        return f"{self.COLORS.get(record.levelname, '')}{log_message}{Style.RESET_ALL}"


class SweepDetailFilter(logging.Filter):
    """Filter out per-sweep debug messages unless full debug is requested."""

    def filter(self, record):
        if record.levelno == logging.DEBUG and record.getMessage().startswith('sweep '):
            return False
        return True


def setup_logging(args):
    """Configure logging based on command-line arguments."""
    logger = logging.getLogger('mpr_gapfill')

    # Clear existing handlers
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    verbose = getattr(args, 'verbose', False)
    full_debug = getattr(args, 'full_debug', False)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)

    console_handler = logging.StreamHandler()

    if verbose:
        console_handler.setLevel(logging.DEBUG)
        # Per-sweep energies are only shown in full debug mode
        if not full_debug:
            console_handler.addFilter(SweepDetailFilter())
    else:
        console_handler.setLevel(logging.INFO)

    console_handler.setFormatter(ColoredFormatter('%(message)s'))
    logger.addHandler(console_handler)

    log_file = getattr(args, 'log_file', None)
    if log_file:
        try:
            file_handler = logging.FileHandler(log_file, mode='w')

            # The file always receives everything
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
            logger.addHandler(file_handler)
            logger.setLevel(logging.DEBUG)
            logger.info(f"Logging to file: {log_file}")
        except Exception as e:
            logger.error(f"Failed to set up log file: {e}")

    logger.info(f"{Fore.CYAN}MPR gap filling{Style.RESET_ALL}")
    logger.info(f"{Fore.CYAN}{'='*50}{Style.RESET_ALL}")

    if verbose:
        logger.debug("Verbose logging enabled")
        if full_debug:
            logger.debug("Full debug mode enabled (including per-sweep energies)")

    return logger
