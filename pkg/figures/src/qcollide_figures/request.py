"""Declarative figure requests, dispatched to the plot builders."""

from __future__ import annotations

from dataclasses import dataclass, field

from .plots import (
    plot_convergence,
    plot_spectrum_panels,
    plot_veff,
    plot_wavefunction,
)
from .schemas import SchemaError

KINDS = ("spectrum_panels", "wavefunction", "convergence", "veff")


@dataclass
class FigureRequest:
    """One figure to render: input bundle paths, kind, styling, output path.

    bundles:
      spectrum_panels -> list of (mu, states_csv_path)
      wavefunction    -> [npz_path]
      convergence     -> [sweep_csv_path]
      veff            -> [veff_csv_path]
    """

    kind: str
    bundles: list
    out_path: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; use {KINDS}")
        if not self.bundles:
            raise SchemaError("no input bundles given")


def render(request: FigureRequest) -> str:
    """Render one request; returns the written file path."""
    if request.kind == "spectrum_panels":
        return plot_spectrum_panels(request.bundles, request.out_path)
    if request.kind == "wavefunction":
        return plot_wavefunction(
            request.bundles[0],
            request.options.get("label", "ground"),
            request.out_path,
        )
    if request.kind == "convergence":
        return plot_convergence(request.bundles[0], request.out_path)
    return plot_veff(
        request.bundles[0], request.out_path,
        log_r=request.options.get("log_r", True),
    )
