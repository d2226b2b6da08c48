#!/usr/bin/env python3
"""Basis-size study for the cylindrical form (quasi-collision energies
versus the number of grid points)."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/basis-convergence"
    raise SystemExit(main(["sweep", "--preset", "basis-convergence", "-o", out]))
