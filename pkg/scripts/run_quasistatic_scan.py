#!/usr/bin/env python3
"""Fixed-R effective potential scan (the quasi-static comparison curve)."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/quasistatic"
    raise SystemExit(main(["quasistatic", "--preset", "quasistatic-default", "-o", out]))
