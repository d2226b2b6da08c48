#!/usr/bin/env python3
"""Cylindrical-geometry reproduction run (radial light-particle motion)."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/cylinder-deuteron"
    raise SystemExit(main(["solve", "--preset", "cylinder-deuteron", "-o", out]))
