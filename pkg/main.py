#!/usr/bin/env python3
"""
MPR Gap Filling

Main entry point for the MPR gap-filling package.
This script imports and runs the main function from the package.
"""

import sys
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from mpr_gapfill.cli import main

if __name__ == "__main__":
    sys.exit(main())
