"""Command-line entry point.

Subcommands: solve, quasistatic, sweep, control. Each reads an INI config
(--config) or a named preset (--preset), applies --set section.key=value
overrides, and writes a CSV bundle plus manifest into --output.

Exit codes: 0 success, 1 invalid config, 2 convergence failure, 3 internal
error. QCOLLIDE_THREADS caps the BLAS thread count.
"""

from __future__ import annotations

import argparse
import os
import sys as _sys
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONVERGENCE = 2
EXIT_INTERNAL = 3


def _apply_thread_env():
    threads = os.environ.get("QCOLLIDE_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


def _load_config(args):
    from .config import apply_overrides, from_ini, preset_config, RunConfig

    if args.preset:
        cfg = preset_config(args.preset)
    elif args.config:
        cfg = from_ini(Path(args.config).read_text())
    else:
        cfg = RunConfig()
    if args.set:
        cfg = apply_overrides(cfg, args.set)
        if args.preset:
            cfg.preset = args.preset
    if args.seed is not None:
        cfg.seed = args.seed
    if args.k is not None:
        cfg.k = args.k
    return cfg


def cmd_solve(args) -> int:
    from .bundles import write_run_bundle
    from .driver import solve_and_classify

    cfg = _load_config(args)
    cfg.validate()
    result = solve_and_classify(cfg)
    files = write_run_bundle(result, args.output)
    rep = result.report
    print(f"states: {files['states']}")
    if not result.solver_stats.get("converged", True):
        print("warning: residual contract unmet; bundle holds partial "
              "best-effort results", file=_sys.stderr)
        return EXIT_CONVERGENCE
    print(f"ground E = {rep.ground_e:.6f} (binding {rep.ground_binding_ev:.1f} eV)")
    if rep.first_qc_index is not None:
        print(f"first quasi-collision: index {rep.first_qc_index}, "
              f"{rep.first_qc_excitation_ev:.1f} eV above ground")
    if rep.proliferation_ev is not None:
        print(f"proliferation onset: {rep.proliferation_ev:.1f} eV above ground")
    return EXIT_OK


def cmd_quasistatic(args) -> int:
    import numpy as np

    from .bundles import write_manifest, write_veff_csv
    from .quasistatic import effective_potential_scan

    cfg = _load_config(args)
    r_vals = np.geomspace(cfg.qs_r_min, cfg.qs_r_max, cfg.qs_r_count)
    curve = effective_potential_scan(
        r_vals, z=cfg.z, beta_count=cfg.qs_beta_count,
        n_xi=cfg.qs_n_xi, n_eta=cfg.qs_n_eta, seed=cfg.seed,
    )
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_veff_csv(curve, outdir / "veff.csv")
    write_manifest(
        outdir / "manifest.json", cfg,
        grid_hash=f"prolate_{cfg.qs_n_xi}x{cfg.qs_n_eta}",
        solver_stats={"xi_max": curve.xi_max.tolist()},
        summary={"repulsive_at_origin": curve.repulsive_at_origin,
                 "beta_count": curve.beta_count, "z": curve.z},
    )
    print(f"veff: {outdir / 'veff.csv'}")
    print(f"repulsive_at_origin: {curve.repulsive_at_origin}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .bundles import write_manifest, write_sweep_csv
    from .config import ConfigError
    from .sweeps import SweepPlan, run_sweep

    cfg = _load_config(args)
    if not cfg.sweep_axis or not cfg.sweep_values:
        raise ConfigError("sweep requires sweep.axis and sweep.values")
    plan = SweepPlan(base=cfg, axis=cfg.sweep_axis, values=cfg.sweep_values)
    rows = run_sweep(plan)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, outdir / "sweep.csv")
    write_manifest(
        outdir / "manifest.json", cfg,
        grid_hash=cfg.grid().grid_hash(),
        solver_stats={"rows": len(rows)},
        summary={"errors": [r["error"] for r in rows if r["error"]]},
    )
    print(f"sweep: {outdir / 'sweep.csv'}")
    failed = [r for r in rows if r["error"]]
    if failed:
        print(f"{len(failed)} row(s) failed; see sweep.csv", file=_sys.stderr)
    return EXIT_OK


def _pick_control_target(report, i: int):
    """First quasi-collision-doublet member reachable from state i via the
    R-odd dV/dR coupling (opposite R-parity; the flagged member itself is
    R-even by construction of I0)."""
    first = report.first_qc_index
    if first is None:
        return None
    pi = report.states[i].parity_r
    lo = max(0, first - 3)
    hi = min(len(report.states), first + 4)
    candidates = [j for j in range(lo, hi) if report.states[j].parity_r == -pi]
    if not candidates:
        return first
    return min(candidates, key=lambda j: abs(j - first))


def cmd_control(args) -> int:
    import numpy as np

    from .bundles import write_control_csv, write_manifest
    from .config import ConfigError
    from .control import gradient_matrix_element, resonance_scan
    from .driver import solve_and_classify
    from .eigensolve import _fix_sign
    from .potentials import PotentialSpec

    cfg = _load_config(args)
    cfg.validate()
    result = solve_and_classify(cfg)
    rep = result.report
    i = cfg.ctrl_state_i
    if cfg.ctrl_state_f is not None:
        f = cfg.ctrl_state_f
    else:
        f = _pick_control_target(rep, i)
    if f is None:
        raise ConfigError("no quasi-collision state found to target; set control.state_f")
    # need actual eigenvectors: rerun the pair through the dense path
    from .eigensolve import dense_oracle
    from .operators import build_hamiltonian

    grid = cfg.grid()
    op = build_hamiltonian(cfg.form, grid, cfg.mu, cfg.z, softening=cfg.softening)
    sol = dense_oracle(op, max(i, f) + 1, cap=grid.total_points)
    phi_i = sol.eigenvectors[:, i]
    phi_f = sol.eigenvectors[:, f]
    delta_eps = float(sol.eigenvalues[f] - sol.eigenvalues[i])
    me = gradient_matrix_element(
        phi_i, phi_f, grid, PotentialSpec(z=cfg.z, form=cfg.form,
                                          softening=cfg.softening),
        axis=cfg.ctrl_coordinate,
    )
    omegas = delta_eps + np.linspace(-cfg.ctrl_omega_halfwidth,
                                     cfg.ctrl_omega_halfwidth,
                                     cfg.ctrl_omega_count)
    scan = resonance_scan(omegas, cfg.ctrl_durations, delta_eps, me,
                          e_field=cfg.ctrl_e_field, prefactor=cfg.ctrl_prefactor)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_control_csv(scan.rows, outdir / "control_scan.csv")
    write_manifest(
        outdir / "manifest.json", cfg,
        grid_hash=grid.grid_hash(),
        solver_stats={"states": [i, f]},
        summary={"delta_eps": delta_eps, "matrix_element": me,
                 "peak_omega": scan.peak_omega,
                 "spans_resonance": scan.spans_resonance,
                 "warning": scan.warning},
    )
    print(f"control scan: {outdir / 'control_scan.csv'}")
    print(f"delta_eps = {delta_eps:.6f}, peak at omega = {scan.peak_omega:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcollide",
        description="Confined three-body quasi-collision spectral toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("solve", cmd_solve), ("quasistatic", cmd_quasistatic),
                     ("sweep", cmd_sweep), ("control", cmd_control)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI config file")
        sp.add_argument("--preset", help="named preset configuration")
        sp.add_argument("--set", action="append", default=[],
                        metavar="section.key=value", help="config override")
        sp.add_argument("--output", "-o", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--k", type=int, default=None)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    _apply_thread_env()
    args = build_parser().parse_args(argv)
    from .config import ConfigError
    from .eigensolve import ConvergenceError
    from .grid import GridError
    from .operators import OperatorError

    try:
        return args.func(args)
    except (ConfigError, GridError, OperatorError, ValueError) as exc:
        print(f"invalid config: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=_sys.stderr)
        return EXIT_CONVERGENCE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
