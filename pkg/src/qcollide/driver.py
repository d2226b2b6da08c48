"""Solve-and-classify orchestration shared by the CLI and the sweep harness.

Solver selection (solver = "auto"):

* parity-reducible grid (symmetric, even-n, cell-centered axes) -> dense
  diagonalization per parity sector; this is the only tractable route to
  the O(10^4) eigenpairs the reproduction presets need;
* otherwise grid small enough -> plain dense;
* otherwise -> Lanczos (iterative) for the k lowest pairs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import parity
from .analysis import (
    SpectrumReport,
    classify_spectrum,
    observables_from_sector,
    summarize_observables,
)
from .config import RunConfig
from .eigensolve import ConvergenceError, dense_oracle, solve_lowest
from .grid import GridSpec
from .operators import MagneticSpec, build_hamiltonian
from .potentials import CYLINDER_2VAR, CYLINDER_3VAR
from .units import PhysicalSystem

DENSE_CUTOFF = 3000


@dataclass
class RunResult:
    report: SpectrumReport
    config: RunConfig
    grid: GridSpec
    sys: PhysicalSystem
    solver_stats: dict
    dumped_states: dict = field(default_factory=dict)  # label -> (index, psi grid array)


def _magnetic(cfg: RunConfig, sys: PhysicalSystem) -> MagneticSpec | None:
    if any(b != 0.0 for b in cfg.b_field):
        return MagneticSpec.from_system(cfg.b_field, sys)
    return None


def _pick_solver(cfg: RunConfig, grid: GridSpec) -> str:
    if cfg.solver != "auto":
        return cfg.solver
    if parity.reducible(grid):
        return "blocked"
    if grid.total_points <= DENSE_CUTOFF:
        return "dense"
    return "lanczos"


def solve_and_classify(cfg: RunConfig) -> RunResult:
    cfg.validate()
    grid = cfg.grid()
    sys = cfg.system()
    method = _pick_solver(cfg, grid)
    t0 = time.perf_counter()
    if method == "blocked":
        result = _solve_blocked(cfg, grid, sys)
    else:
        result = _solve_direct(cfg, grid, sys, method)
    result.solver_stats["wall_time_s"] = time.perf_counter() - t0
    result.solver_stats["method"] = method
    result.solver_stats["seed"] = cfg.seed
    result.solver_stats["k"] = cfg.k
    return result


def _solve_direct(cfg: RunConfig, grid, sys, method: str) -> RunResult:
    op = build_hamiltonian(
        cfg.form, grid, cfg.mu, cfg.z,
        magnetic=_magnetic(cfg, sys), softening=cfg.softening,
    )
    converged = True
    if method == "dense":
        sol = dense_oracle(op, cfg.k, cap=max(DENSE_CUTOFF, grid.total_points))
    else:
        try:
            sol = solve_lowest(op, cfg.k, tol=cfg.tol, seed=cfg.seed)
        except ConvergenceError as err:
            # keep the best-effort pairs so partial results can be flagged
            sol = err.result
            converged = False
    report = classify_spectrum(
        sol, grid, sys, cfg.form,
        qc_threshold_rel=cfg.qc_threshold_rel,
        prolif_window=cfg.prolif_window,
        prolif_min_count=cfg.prolif_min_count,
    )
    dumps = {}
    scale = 1.0 / np.sqrt(grid.cell_volume)
    for label, idx in _dump_requests(cfg, report).items():
        psi = sol.eigenvectors[:, idx] * scale
        dumps[label] = (idx, _undo_transform(psi, grid, cfg.form))
    stats = dict(sol.solver_stats)
    stats["converged"] = converged
    stats["max_residual"] = float(np.max(sol.residuals))
    return RunResult(
        report=report, config=cfg, grid=grid, sys=sys,
        solver_stats=stats, dumped_states=dumps,
    )


def _solve_blocked(cfg: RunConfig, grid, sys) -> RunResult:
    sectors = parity.build_sectors(
        cfg.form, grid, cfg.mu, cfg.z,
        magnetic=_magnetic(cfg, sys), softening=cfg.softening,
    )
    energies, i0s, psi0s, par_r = [], [], [], []
    sector_vecs = []  # kept per sector for the dump reconstruction
    for sec in sectors:
        vals, vecs = np.linalg.eigh(sec.matrix)
        i0, psi0 = observables_from_sector(sec.signs, vecs, grid, cfg.form)
        energies.append(vals)
        i0s.append(i0)
        psi0s.append(psi0)
        par_r.append(np.full(len(vals), sec.signs[0], dtype=int))
        sector_vecs.append((sec.signs, vals, vecs))
    energies = np.concatenate(energies)
    order = np.argsort(energies, kind="stable")[: cfg.k]
    energies = energies[order]
    i0 = np.concatenate(i0s)[order]
    psi0 = np.concatenate(psi0s)[order]
    par = np.concatenate(par_r)[order]
    report = summarize_observables(
        energies, i0, psi0, par, sys,
        qc_threshold_rel=cfg.qc_threshold_rel,
        prolif_window=cfg.prolif_window,
        prolif_min_count=cfg.prolif_min_count,
    )
    dumps = {}
    wanted = _dump_requests(cfg, report)
    if wanted:
        # locate each global index back in its sector
        flat = []
        for s, (signs, vals, vecs) in enumerate(sector_vecs):
            flat.append(np.stack([np.full(len(vals), s), np.arange(len(vals))], 1))
        flat = np.concatenate(flat)[np.argsort(np.concatenate([sv[1] for sv in sector_vecs]), kind="stable")]
        scale = 1.0 / np.sqrt(grid.cell_volume)
        for label, idx in wanted.items():
            s, col = flat[idx]
            signs, vals, vecs = sector_vecs[s]
            full = parity.expand_vector(vecs[:, col], signs, grid) * scale
            dumps[label] = (idx, _undo_transform(full, grid, cfg.form))
    stats = {"sectors": [list(s.signs) for s in sectors],
             "sector_dims": [s.dimension for s in sectors]}
    return RunResult(
        report=report, config=cfg, grid=grid, sys=sys,
        solver_stats=stats, dumped_states=dumps,
    )


def _undo_transform(psi: np.ndarray, grid: GridSpec, form: str) -> np.ndarray:
    """Grid-measure wavefunction with the sqrt|x| similarity undone."""
    if form in (CYLINDER_2VAR, CYLINDER_3VAR):
        x = np.abs(grid.points("x"))
        shape = [1] * grid.ndim
        shape[grid.axis_index("x")] = grid.axis("x").n
        psi = psi.reshape(grid.shape) / np.sqrt(x).reshape(shape)
        return psi.reshape(-1)
    return psi


def _dump_requests(cfg: RunConfig, report: SpectrumReport) -> dict:
    out = {}
    for label in cfg.dump_states:
        if label == "ground":
            out["ground"] = 0
        elif label == "first_qc":
            if report.first_qc_index is not None:
                out["first_qc"] = report.first_qc_index
        else:
            idx = int(label)
            if 0 <= idx < len(report.states):
                out[f"state_{idx}"] = idx
    return out
