"""
Main entry point for the decoherence-kit CLI
"""

import sys

from decokit.cli import main

if __name__ == "__main__":
    sys.exit(main())
