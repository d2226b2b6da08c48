#!/usr/bin/env python3
"""Three-variable (R, x, y) reproduction run on the 28^3 grid."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/threevar-deuteron"
    raise SystemExit(main(["solve", "--preset", "threevar-deuteron", "-o", out]))
