"""Spin-wave chirality maxima for ring sizes 3..10, exact vs sampled.

    python scripts/run_figure2.py --shots 10000 --seed 0 --out fig2.csv
"""
import sys

from chiralqc.cli import main

if __name__ == "__main__":
    sys.exit(main(["figure2", *sys.argv[1:]]))
