"""Command-line figure generation from solver CSV bundles.

Subcommands: spectrum, wavefunction, convergence, veff. Exit codes:
0 success, 1 schema or input error.
"""

from __future__ import annotations

import argparse
import sys

from .plots import (
    plot_convergence,
    plot_spectrum_panels,
    plot_veff,
    plot_wavefunction,
)
from .schemas import SchemaError


def _parse_bundle(text: str):
    # "MU:PATH", e.g. "0.00027:out/planar/states.csv"
    mu, _, path = text.partition(":")
    return float(mu), path


def build_parser():
    p = argparse.ArgumentParser(prog="qcollide-figures")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="I0 and psi(0,0) panels per mass ratio")
    sp.add_argument("--bundle", action="append", required=True,
                    metavar="MU:STATES_CSV")
    sp.add_argument("--out", required=True)

    wf = sub.add_parser("wavefunction", help="|psi| heatmap of a dumped state")
    wf.add_argument("--npz", required=True)
    wf.add_argument("--label", default="ground")
    wf.add_argument("--out", required=True)

    cv = sub.add_parser("convergence", help="QC energies versus a swept value")
    cv.add_argument("--sweep", required=True)
    cv.add_argument("--out", required=True)

    ve = sub.add_parser("veff", help="effective potential curves")
    ve.add_argument("--veff", required=True)
    ve.add_argument("--out", required=True)
    ve.add_argument("--linear-r", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum":
            out = plot_spectrum_panels(
                [_parse_bundle(b) for b in args.bundle], args.out)
        elif args.command == "wavefunction":
            out = plot_wavefunction(args.npz, args.label, args.out)
        elif args.command == "convergence":
            out = plot_convergence(args.sweep, args.out)
        else:
            out = plot_veff(args.veff, args.out, log_r=not args.linear_r)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
