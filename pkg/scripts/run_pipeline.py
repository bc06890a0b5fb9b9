#!/usr/bin/env python3
"""
Pipeline Runner Script

Command-line entry point for encoding images, training template stores,
evaluating datasets and running inhibition-region sweeps.
"""

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from cli import main

if __name__ == "__main__":
    sys.exit(main())
