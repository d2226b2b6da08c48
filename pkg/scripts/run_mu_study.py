#!/usr/bin/env python3
"""Mass-ratio study: quasi-collision onset versus mu on the planar form."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/mu-study"
    raise SystemExit(main(["sweep", "--preset", "mu-study", "-o", out]))
