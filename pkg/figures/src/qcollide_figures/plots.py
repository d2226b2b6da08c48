"""Figure builders over validated bundle arrays.

Pure functions of their input CSVs; deterministic for fixed styling.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import SchemaError, read_states, read_sweep, read_veff, read_wavefunction

_SAVE_KW = dict(dpi=150, metadata={"Software": None})
POINT_MARKER_MU = 0.1  # at this mass ratio and above, points instead of lines


def _finish(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, **_SAVE_KW)
    plt.close(fig)
    return str(out_path)


def plot_spectrum_panels(bundles, out_path):
    """I0 and psi(0,0) versus spectral index, one row per mass ratio.

    bundles: list of (mu, states_csv_path), plotted top to bottom. Mass
    ratios >= 0.1 use point markers so nonzero ground-state values stay
    visible.
    """
    if not bundles:
        raise SchemaError("no bundles given")
    data = [(mu, read_states(path)) for mu, path in bundles]
    n = len(data)
    fig, axes = plt.subplots(n, 2, figsize=(9.0, 2.6 * n), squeeze=False)
    for row, (mu, cols) in enumerate(data):
        ax_i0, ax_psi = axes[row]
        style = (
            dict(linestyle="none", marker=".", markersize=3)
            if mu >= POINT_MARKER_MU
            else dict(linestyle="-", linewidth=0.7)
        )
        ax_i0.plot(cols["index"], cols["I0"], color="tab:blue", **style)
        ax_psi.plot(cols["index"], cols["psi_origin"], color="tab:red", **style)
        ax_i0.set_ylabel(f"mu = {mu:g}\nI0")
        ax_psi.set_ylabel("psi(0,0)")
        for ax in (ax_i0, ax_psi):
            ax.margins(x=0.02)
    axes[-1][0].set_xlabel("spectral index")
    axes[-1][1].set_xlabel("spectral index")
    fig.suptitle("Collision-plane density and origin amplitude per eigenstate")
    fig.tight_layout()
    return _finish(fig, out_path)


def plot_wavefunction(npz_path, label, out_path):
    """|psi| heatmap of a dumped state on the (R, x) grid."""
    psi, pts_r, pts_x = read_wavefunction(npz_path, label)
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    mesh = ax.pcolormesh(
        pts_r, pts_x, np.abs(psi).T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="|psi|")
    ax.set_xlabel("R")
    ax.set_ylabel("x")
    ax.set_title(f"state: {label}")
    fig.tight_layout()
    return _finish(fig, out_path)


def plot_convergence(sweep_csv, out_path):
    """First quasi-collision energy (lower line) and proliferation onset
    (upper line) versus the swept value."""
    cols = read_sweep(sweep_csv)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(cols["value"], cols["first_qc_excitation_ev"], "o-",
            label="first quasi-collision state")
    ax.plot(cols["value"], cols["proliferation_ev"], "s-",
            label="proliferation onset")
    ax.set_xlabel(f"swept value ({cols['axis'][0]})")
    ax.set_ylabel("excitation energy [eV]")
    ax.legend()
    fig.tight_layout()
    return _finish(fig, out_path)


def plot_veff(veff_csv, out_path, log_r: bool = True):
    """Effective potential curves v_eff(R) = 4 lambda(R)/R per level."""
    cols = read_veff(veff_csv)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for b in np.unique(cols["beta"]):
        sel = cols["beta"] == b
        ax.plot(cols["R"][sel], cols["v_eff"][sel], "-", label=f"level {b}")
    if log_r:
        ax.set_xscale("log")
    ax.set_xlabel("R")
    ax.set_ylabel("v_eff = 4 lambda(R) / R")
    ax.legend()
    ax.axhline(0.0, color="gray", linewidth=0.6)
    fig.tight_layout()
    return _finish(fig, out_path)
