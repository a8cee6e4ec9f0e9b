"""
Main Entry Point
Obrauer - Cyclotomic Oriented Brauer Engine

Usage: python -m app.main <command> [options]
"""

import sys

from app.cli import run


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
