"""Readers for the documented solver CSV bundles.

Figures never recompute physics: these readers validate the fixed column
schemas and hand back plain arrays. Any mismatch raises SchemaError before
an output file is touched.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

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


class SchemaError(ValueError):
    """Input bundle does not match the documented schema."""


def _read_csv(path, expected_columns):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"missing bundle file: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"empty bundle file: {path}") from None
        if header != expected_columns:
            raise SchemaError(
                f"{path}: columns {header} do not match schema {expected_columns}"
            )
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_states(path) -> dict:
    rows = _read_csv(path, STATES_COLUMNS)
    cols = list(zip(*rows))
    return {
        "index": np.array(cols[0], dtype=int),
        "e_dimensionless": np.array(cols[1], dtype=float),
        "e_ev_above_ground": np.array(cols[2], dtype=float),
        "I0": np.array(cols[3], dtype=float),
        "psi_origin": np.array(cols[4], dtype=float),
        "parity_R": np.array(cols[5], dtype=int),
        "is_quasi_collision": np.array(cols[6], dtype=int).astype(bool),
    }


def read_veff(path) -> dict:
    rows = _read_csv(path, VEFF_COLUMNS)
    cols = list(zip(*rows))
    return {
        "R": np.array(cols[0], dtype=float),
        "beta": np.array(cols[1], dtype=int),
        "lambda": np.array(cols[2], dtype=float),
        "v_eff": np.array(cols[3], dtype=float),
        "xi_max": np.array(cols[4], dtype=float),
    }


def read_sweep(path) -> dict:
    rows = _read_csv(path, SWEEP_COLUMNS)
    cols = list(zip(*rows))

    def _floats(vals):
        return np.array([float(v) if v else np.nan for v in vals])

    return {
        "axis": list(cols[0]),
        "value": _floats(cols[1]),
        "ground_e_dimensionless": _floats(cols[2]),
        "first_qc_index": _floats(cols[3]),
        "first_qc_excitation_ev": _floats(cols[4]),
        "proliferation_ev": _floats(cols[5]),
        "error": list(cols[9]),
    }


def read_wavefunction(path, label: str):
    """Wavefunction dump from states.npz: (psi 2-D array, R points, x points)."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"missing dump file: {path}")
    with np.load(path) as npz:
        key = f"psi_{label}"
        if key not in npz:
            raise SchemaError(
                f"{path}: no dump named {label!r}; has {sorted(npz.files)}")
        psi = npz[key]
        if psi.ndim != 2:
            raise SchemaError(
                f"{path}: dump {label!r} is {psi.ndim}-dimensional; heatmaps "
                "need a two-variable run")
        if "points_R" not in npz or "points_x" not in npz:
            raise SchemaError(f"{path}: missing axis point arrays")
        return psi, npz["points_R"], npz["points_x"]


def read_manifest_mu(path) -> float | None:
    """Pull the mass ratio out of a bundle manifest, when present."""
    path = Path(path)
    if not path.exists():
        return None
    with open(path) as f:
        manifest = json.load(f)
    return manifest.get("config", {}).get("mu")
