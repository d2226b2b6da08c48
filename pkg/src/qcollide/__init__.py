"""Spectral solver and analysis toolkit for charged three-body systems in a box."""

__version__ = "0.1.0"

from .units import (  # noqa: F401
    PhysicalSystem,
    derive_system,
    electron_deuteron_system,
    from_ev,
    magnetic_field_factor,
    to_angstrom,
    to_ev,
)
from .grid import Axis, GridSpec, make_box_grid, nearest_plane_indices  # noqa: F401
from .potentials import PotentialSpec, eval_gradient, eval_potential  # noqa: F401
from .operators import (  # noqa: F401
    MagneticSpec,
    SparseOperator,
    apply,
    build_hamiltonian,
    build_prolate_fixed_r,
)
from .eigensolve import (  # noqa: F401
    EigenSolution,
    dense_oracle,
    solve_lowest,
    solve_lowest_generalized,
)
from .analysis import (  # noqa: F401
    SpectrumReport,
    StateReport,
    classify_spectrum,
    compute_i0,
    psi_at_origin,
)
from .quasistatic import effective_potential_scan, lambda_of_r  # noqa: F401
from .control import (  # noqa: F401
    PulseSpec,
    TransitionResult,
    dipole_matrix_element,
    gradient_matrix_element,
    resonance_scan,
    transition_amplitude,
)
from .config import RunConfig, preset_config  # noqa: F401
from .driver import solve_and_classify  # noqa: F401
