"""Allow running the command-line interface as ``python3 -m cgwitness``."""

import sys

from cgwitness.cli import main

if __name__ == "__main__":
    sys.exit(main())
