"""Figure generation for qcollide result bundles."""

__version__ = "0.1.0"

from .plots import (  # noqa: F401
    plot_convergence,
    plot_spectrum_panels,
    plot_veff,
    plot_wavefunction,
)
from .request import FigureRequest, render  # noqa: F401
from .schemas import SchemaError  # noqa: F401
