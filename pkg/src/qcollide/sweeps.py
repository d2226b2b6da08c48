"""Parameter-study harness: mu sweeps, box-size sweeps, basis-size sweeps.

Rows run independently; a failing row records its error and the sweep
continues. Every row logs the seed and grid hash so any row can be re-run
bit-identically.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, RunConfig
from .driver import solve_and_classify

SWEEP_AXES = ("mu", "box_half_width", "basis_size")


@dataclass
class SweepPlan:
    base: RunConfig
    axis: str
    values: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}")
        vals = list(self.values)
        if len(vals) < 2 or not all(b > a for a, b in zip(vals, vals[1:])):
            raise ConfigError("sweep values must be strictly increasing, >= 2 of them")


def _row_config(plan: SweepPlan, value) -> RunConfig:
    cfg = copy.deepcopy(plan.base)
    cfg.preset = None
    if plan.axis == "mu":
        cfg.mu = float(value)
    elif plan.axis == "box_half_width":
        cfg.axes = [(n, -float(value), float(value), c) for n, _, _, c in cfg.axes]
    else:  # basis_size: points per axis at fixed box
        n = int(value)
        cfg.axes = [(name, lo, hi, n) for name, lo, hi, _ in cfg.axes]
        cfg.k = min(cfg.k, n ** len(cfg.axes))
    return cfg


def run_row(plan: SweepPlan, value) -> dict:
    cfg = _row_config(plan, value)
    row = {
        "axis": plan.axis,
        "value": float(value),
        "seed": cfg.seed,
        "grid_hash": cfg.grid().grid_hash(),
        "error": None,
    }
    t0 = time.perf_counter()
    try:
        result = solve_and_classify(cfg)
        rep = result.report
        if not result.solver_stats.get("converged", True):
            row["error"] = "ConvergenceError: residual contract unmet"
        row.update(
            ground_e=rep.ground_e,
            first_qc_index=rep.first_qc_index,
            first_qc_excitation_ev=rep.first_qc_excitation_ev,
            proliferation_ev=rep.proliferation_ev,
        )
    except Exception as exc:  # row isolation: record, keep sweeping
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time_s"] = time.perf_counter() - t0
    return row


def run_sweep(plan: SweepPlan) -> list[dict]:
    """One summary row per value, failures isolated per row."""
    return [run_row(plan, v) for v in plan.values]


def mu_study(mu_values, base: RunConfig) -> dict:
    """Per-mu summaries plus the first-QC-index monotonicity indicators."""
    plan = SweepPlan(base=base, axis="mu", values=list(mu_values))
    rows = run_sweep(plan)
    idx = [r.get("first_qc_index") for r in rows]
    ok = all(r["error"] is None for r in rows) and all(i is not None for i in idx)
    return {
        "rows": rows,
        "first_qc_indices": idx,
        "strictly_decreasing": bool(ok and all(a > b for a, b in zip(idx, idx[1:]))),
        "non_increasing": bool(ok and all(a >= b for a, b in zip(idx, idx[1:]))),
    }


def first_qc_energies(rows: list[dict]) -> np.ndarray:
    return np.array(
        [np.nan if r.get("first_qc_excitation_ev") is None
         else r["first_qc_excitation_ev"] for r in rows]
    )
