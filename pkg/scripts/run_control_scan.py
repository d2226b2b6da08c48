#!/usr/bin/env python3
"""Resonance scan of the first-order transition amplitude into the lowest
quasi-collision doublet."""

import sys

from qcollide.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/control"
    raise SystemExit(main(["control", "--preset", "control-default", "-o", out]))
