"""Result bundle IO: CSV files plus a JSON manifest per run.

Schemas (fixed column order, UTF-8, '.' decimal, 17 significant digits):

* states.csv: index, e_dimensionless, e_ev_above_ground, I0, psi_origin,
  parity_R, is_quasi_collision
* veff.csv: R, beta, lambda, v_eff, xi_max
* sweep.csv: axis, value, ground_e_dimensionless, first_qc_index,
  first_qc_excitation_ev, proliferation_ev, seed, grid_hash, wall_time_s,
  error
* control_scan.csv: omega, T, amplitude, delta
* states.npz: wavefunction dumps (axes, points, one array per label)

The manifest embeds the verbatim config text, the grid hash, solver stats,
the units table and package/library versions; identical config + seed
reproduce the bundle bit-identically on one machine.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import SpectrumReport
from .config import RunConfig
from .driver import RunResult
from .quasistatic import EffectivePotentialCurve
from .units import units_table

SCHEMA_VERSION = 1

STATES_COLUMNS = [
    "index", "e_dimensionless", "e_ev_above_ground", "I0", "psi_origin",
    "parity_R", "is_quasi_collision",
]
VEFF_COLUMNS = ["R", "beta", "lambda", "v_eff", "xi_max"]
SWEEP_COLUMNS = [
    "axis", "value", "ground_e_dimensionless", "first_qc_index",
    "first_qc_excitation_ev", "proliferation_ev", "seed", "grid_hash",
    "wall_time_s", "error",
]
CONTROL_COLUMNS = ["omega", "T", "amplitude", "delta"]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return f"{float(x):.16e}"


def write_states_csv(report: SpectrumReport, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(STATES_COLUMNS)
        for s in report.states:
            w.writerow([
                s.index, _fmt(s.e_dimensionless), _fmt(s.e_ev), _fmt(s.i0),
                _fmt(s.psi_origin), s.parity_r, 1 if s.is_quasi_collision else 0,
            ])


def write_veff_csv(curve: EffectivePotentialCurve, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(VEFF_COLUMNS)
        for i, r in enumerate(curve.r_values):
            for b in range(curve.beta_count):
                w.writerow([
                    _fmt(r), b, _fmt(curve.lam[i, b]), _fmt(curve.v_eff[i, b]),
                    _fmt(curve.xi_max[i]),
                ])


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([
                r["axis"], _fmt(r["value"]), _fmt(r.get("ground_e")),
                "" if r.get("first_qc_index") is None else int(r["first_qc_index"]),
                _fmt(r.get("first_qc_excitation_ev")),
                _fmt(r.get("proliferation_ev")),
                int(r["seed"]), r["grid_hash"], _fmt(r.get("wall_time_s")),
                r.get("error") or "",
            ])


def write_control_csv(rows, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CONTROL_COLUMNS)
        for omega, t, amp, delta in rows:
            w.writerow([_fmt(omega), _fmt(t), _fmt(amp), _fmt(delta)])


def write_manifest(path, cfg: RunConfig, *, grid_hash: str, solver_stats: dict,
                   sys=None, summary: dict | None = None,
                   reference_targets: dict | None = None) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config_ini": cfg.to_ini(),
        "config": cfg.as_dict(),
        "grid_hash": grid_hash,
        "seed": cfg.seed,
        "solver_stats": _jsonable(solver_stats),
        "versions": _library_versions(),
    }
    if sys is not None:
        manifest["units"] = units_table(sys)
    if summary is not None:
        manifest["summary"] = _jsonable(summary)
    if reference_targets is not None:
        manifest["reference_targets"] = _jsonable(reference_targets)
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _library_versions() -> dict:
    import numpy
    import scipy

    return {"numpy": numpy.__version__, "scipy": scipy.__version__}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def report_summary(report: SpectrumReport) -> dict:
    return {
        "ground_e_dimensionless": report.ground_e,
        "ground_binding_ev": report.ground_binding_ev,
        "n_states": len(report.states),
        "n_quasi_collision": sum(s.is_quasi_collision for s in report.states),
        "qc_threshold": report.qc_threshold,
        "first_qc_index": report.first_qc_index,
        "first_qc_excitation_ev": report.first_qc_excitation_ev,
        "proliferation_ev": report.proliferation_ev,
        "proliferation_e_dimensionless": report.proliferation_e,
    }


REFERENCE_TARGETS = {
    "planar-deuteron": {
        "ground_binding_ev": (120.0, 0.10),
        "first_qc_excitation_ev": (160.0, 0.20),
        "proliferation_ev": (500.0, 0.25),
    },
    "cylinder-deuteron": {
        "first_qc_excitation_ev": (389.0, 0.20),
        "proliferation_ev": (540.0, 0.25),
    },
    "threevar-deuteron": {
        "first_qc_e_dimensionless": (2.8, 0.20),
        "proliferation_e_dimensionless": (3.59, 0.25),
    },
}


def reference_comparison(preset: str, report: SpectrumReport) -> dict | None:
    targets = REFERENCE_TARGETS.get(preset or "")
    if targets is None:
        return None
    computed = {
        "ground_binding_ev": report.ground_binding_ev,
        "first_qc_excitation_ev": report.first_qc_excitation_ev,
        "proliferation_ev": report.proliferation_ev,
        "first_qc_e_dimensionless": (
            None if report.first_qc_index is None
            else report.states[report.first_qc_index].e_dimensionless
        ),
        "proliferation_e_dimensionless": report.proliferation_e,
    }
    out = {}
    for key, (target, tol) in targets.items():
        val = computed.get(key)
        ok = val is not None and abs(val - target) <= tol * abs(target)
        out[key] = {
            "computed": val,
            "target": target,
            "rel_tolerance": tol,
            "in_tolerance": bool(ok),
        }
    return out


def write_run_bundle(result: RunResult, outdir) -> dict:
    """states.csv + manifest.json (+ states.npz dumps); returns file map."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = {}
    states_path = outdir / "states.csv"
    write_states_csv(result.report, states_path)
    files["states"] = str(states_path)
    if result.dumped_states:
        arrays = {
            f"psi_{label}": psi.reshape(result.grid.shape)
            for label, (_, psi) in result.dumped_states.items()
        }
        arrays["dump_labels"] = np.array(
            list(result.dumped_states.keys()), dtype="U32")
        arrays["dump_indices"] = np.array(
            [idx for idx, _ in result.dumped_states.values()], dtype=int)
        for ax in result.grid.axes:
            arrays[f"points_{ax.name}"] = ax.points()
        np.savez(outdir / "states.npz", **arrays)
        files["dumps"] = str(outdir / "states.npz")
    manifest_path = outdir / "manifest.json"
    write_manifest(
        manifest_path, result.config,
        grid_hash=result.grid.grid_hash(),
        solver_stats=result.solver_stats,
        sys=result.sys,
        summary=report_summary(result.report),
        reference_targets=reference_comparison(result.config.preset, result.report),
    )
    files["manifest"] = str(manifest_path)
    return files


def read_states_csv(path) -> dict:
    """Parse a states.csv back into column arrays (used by tests/figures)."""
    with open(path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header != STATES_COLUMNS:
            raise ValueError(f"unexpected states.csv columns: {header}")
        cols = {name: [] for name in header}
        for row in rd:
            for name, val in zip(header, row):
                cols[name].append(val)
    out = {
        "index": np.array(cols["index"], dtype=int),
        "e_dimensionless": np.array(cols["e_dimensionless"], dtype=float),
        "e_ev_above_ground": np.array(cols["e_ev_above_ground"], dtype=float),
        "I0": np.array(cols["I0"], dtype=float),
        "psi_origin": np.array(cols["psi_origin"], dtype=float),
        "parity_R": np.array(cols["parity_R"], dtype=int),
        "is_quasi_collision": np.array(cols["is_quasi_collision"], dtype=int).astype(bool),
    }
    return out
