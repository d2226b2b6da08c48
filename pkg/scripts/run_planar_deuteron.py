#!/usr/bin/env python3
"""Full planar reproduction run: 148x148 box, all observables, bundle out."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/planar-deuteron"
    raise SystemExit(main(["solve", "--preset", "planar-deuteron", "-o", out]))
