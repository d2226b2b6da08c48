"""Per-state observables and quasi-collision classification.

I0 is the probability density integrated over the R = 0 plane (the
quasi-collision observable): the eigenvector is interpolated onto R = 0
from the two bracketing planes and |psi|^2 is integrated over the
remaining coordinates with the plain measure, matching the forms used in
the source problem. States are normalized on the physical grid measure
(cylindrical |x| weight included; the sqrt|x| similarity transform is
undone before any pointwise use of psi).

A state is flagged quasi-collision when I0 exceeds a relative threshold
(default 1e-3 of the largest I0 in the computed window). The proliferation
energy is the first flagged cluster followed by at least `prolif_min_count`
further distinct flagged clusters within `prolif_window` dimensionless
energy units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolve import EigenSolution, _fix_sign
from .grid import GridSpec, nearest_plane_indices
from .potentials import CYLINDER_2VAR, CYLINDER_3VAR, PLANAR_2VAR
from .units import PhysicalSystem, to_ev

QC_THRESHOLD_REL = 1e-3
PROLIF_WINDOW = 1.0
PROLIF_MIN_COUNT = 3
_CLUSTER_RTOL = 1e-6


class NormalizationError(ValueError):
    """State is not normalized on the grid measure."""


@dataclass
class StateReport:
    index: int
    e_dimensionless: float
    e_ev: float  # excitation above the ground state
    i0: float
    psi_origin: float
    parity_r: int
    is_quasi_collision: bool


@dataclass
class SpectrumReport:
    states: list[StateReport]
    ground_e: float
    qc_threshold: float
    qc_threshold_rel: float
    prolif_window: float
    prolif_min_count: int
    first_qc_index: int | None = None
    first_qc_excitation_ev: float | None = None
    proliferation_e: float | None = None
    proliferation_ev: float | None = None  # excitation above ground
    energy_scale_ev: float = 1.0
    extras: dict = field(default_factory=dict)

    @property
    def ground_binding_ev(self) -> float:
        """|E0| in eV when the ground state is bound (E0 < 0)."""
        return -self.ground_e * self.energy_scale_ev


def normalize_grid_measure(state: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Rescale a vector so that sum |psi|^2 * cell_volume = 1."""
    nrm = np.linalg.norm(state) * np.sqrt(grid.cell_volume)
    if nrm == 0.0:
        raise NormalizationError("zero state")
    return state / nrm


def _check_normalized(state: np.ndarray, grid: GridSpec):
    nrm2 = float(state @ state) * grid.cell_volume
    if abs(nrm2 - 1.0) > 1e-6:
        raise NormalizationError(
            f"state norm^2 on the grid measure is {nrm2!r}, expected 1"
        )


def _transform_correction(grid: GridSpec, form: str) -> np.ndarray | None:
    """1/sqrt|x| factor undoing the radial similarity, or None."""
    if form not in (CYLINDER_2VAR, CYLINDER_3VAR):
        return None
    x = np.abs(grid.points("x"))
    shape = [1] * grid.ndim
    shape[grid.axis_index("x")] = grid.axis("x").n
    return (1.0 / np.sqrt(x)).reshape(shape)


def compute_i0(state: np.ndarray, grid: GridSpec, form: str = PLANAR_2VAR) -> float:
    """Quasi-collision probability of a grid-measure-normalized state."""
    _check_normalized(state, grid)
    psi = state.reshape(grid.shape)
    corr = _transform_correction(grid, form)
    if corr is not None:
        psi = psi * corr
    r_ax = grid.axis_index("R")
    (i0, i1), (w0, w1) = nearest_plane_indices(grid, "R", 0.0)
    plane = w0 * np.take(psi, i0, axis=r_ax) + w1 * np.take(psi, i1, axis=r_ax)
    h_other = np.prod([a.spacing for a in grid.axes if a.name != "R"])
    return float(np.sum(plane**2) * h_other)


def psi_at_origin(state: np.ndarray, grid: GridSpec, form: str = PLANAR_2VAR) -> float:
    """Multi-linear interpolation of the transform-corrected state at 0.

    The caller fixes the sign convention (largest-magnitude component
    positive); classify_spectrum does this for every eigenvector.
    """
    _check_normalized(state, grid)
    psi = state.reshape(grid.shape)
    corr = _transform_correction(grid, form)
    if corr is not None:
        psi = psi * corr
    for ax in range(grid.ndim):
        (i0, i1), (w0, w1) = nearest_plane_indices(grid, grid.axes[ax].name, 0.0)
        psi = w0 * np.take(psi, i0, axis=0) + w1 * np.take(psi, i1, axis=0)
    return float(psi)


def parity_under_reflection(state: np.ndarray, grid: GridSpec, axis: str = "R") -> float:
    """<psi, P psi> for the sign-flip reflection along `axis`."""
    psi = state.reshape(grid.shape)
    flipped = np.flip(psi, axis=grid.axis_index(axis))
    return float(np.sum(psi * flipped) / np.sum(psi * psi))


def _distinct_clusters(energies: np.ndarray) -> np.ndarray:
    out = [energies[0]]
    for e in energies[1:]:
        if e - out[-1] > _CLUSTER_RTOL * max(1.0, abs(e)):
            out.append(e)
    return np.asarray(out)


def summarize_observables(
    energies: np.ndarray,
    i0: np.ndarray,
    psi0: np.ndarray,
    parity_r: np.ndarray,
    sys: PhysicalSystem,
    qc_threshold_rel: float = QC_THRESHOLD_REL,
    prolif_window: float = PROLIF_WINDOW,
    prolif_min_count: int = PROLIF_MIN_COUNT,
) -> SpectrumReport:
    """Build the per-state reports and the quasi-collision summary."""
    energies = np.asarray(energies)
    ground = float(energies[0])
    i0max = float(np.max(i0)) if len(i0) else 0.0
    thr = qc_threshold_rel * i0max
    qc = i0 > thr if i0max > 0.0 else np.zeros(len(i0), bool)

    states = [
        StateReport(
            index=j,
            e_dimensionless=float(energies[j]),
            e_ev=to_ev(float(energies[j]) - ground, sys),
            i0=float(i0[j]),
            psi_origin=float(psi0[j]),
            parity_r=int(parity_r[j]),
            is_quasi_collision=bool(qc[j]),
        )
        for j in range(len(energies))
    ]
    report = SpectrumReport(
        states=states,
        ground_e=ground,
        qc_threshold=thr,
        qc_threshold_rel=qc_threshold_rel,
        prolif_window=prolif_window,
        prolif_min_count=prolif_min_count,
        energy_scale_ev=sys.energy_scale_ev,
    )
    idx = np.nonzero(qc)[0]
    if len(idx) == 0:
        return report
    report.first_qc_index = int(idx[0])
    report.first_qc_excitation_ev = to_ev(float(energies[idx[0]]) - ground, sys)
    clusters = _distinct_clusters(energies[idx])
    for e_c in clusters:
        followers = np.sum((clusters > e_c) & (clusters <= e_c + prolif_window))
        if followers >= prolif_min_count:
            report.proliferation_e = float(e_c)
            report.proliferation_ev = to_ev(float(e_c) - ground, sys)
            break
    return report


def classify_spectrum(
    solution: EigenSolution,
    grid: GridSpec,
    sys: PhysicalSystem,
    form: str = PLANAR_2VAR,
    qc_threshold_rel: float = QC_THRESHOLD_REL,
    prolif_window: float = PROLIF_WINDOW,
    prolif_min_count: int = PROLIF_MIN_COUNT,
) -> SpectrumReport:
    """Classify the eigenpairs of a direct (unblocked) solve."""
    vecs = _fix_sign(solution.eigenvectors.copy())
    scale = 1.0 / np.sqrt(grid.cell_volume)
    n_states = solution.k
    i0 = np.empty(n_states)
    psi0 = np.empty(n_states)
    par = np.empty(n_states, dtype=int)
    for j in range(n_states):
        state = vecs[:, j] * scale
        i0[j] = compute_i0(state, grid, form)
        psi0[j] = psi_at_origin(state, grid, form)
        p = parity_under_reflection(state, grid, "R")
        par[j] = int(np.sign(p)) if abs(p) > 0.5 else 0
    # parity forces exact zeros; scrub interpolation dust
    i0[par == -1] = 0.0
    psi0[par == -1] = 0.0
    return summarize_observables(
        solution.eigenvalues, i0, psi0, par, sys,
        qc_threshold_rel, prolif_window, prolif_min_count,
    )


def observables_from_sector(
    signs: tuple[int, ...],
    eigvecs: np.ndarray,
    grid: GridSpec,
    form: str,
) -> tuple[np.ndarray, np.ndarray]:
    """(I0, psi_origin) for every column eigenvector of one parity sector.

    Vectorized over states; eigvecs are the sector-block vectors (l2
    orthonormal). Used by the blocked full-scale path and cross-checked
    against the direct route in the tests.
    """
    half_shape = tuple(a.n // 2 for a in grid.axes)
    m_r = half_shape[0]
    n_states = eigvecs.shape[1]
    h_r = grid.axes[0].spacing
    if signs[0] == -1:
        return np.zeros(n_states), np.zeros(n_states)

    blocks = eigvecs.reshape(half_shape + (n_states,))
    plane = blocks[m_r - 1]  # values on the R = -h/2 representative plane
    if form in (CYLINDER_2VAR, CYLINDER_3VAR):
        x_half = np.abs(grid.points("x")[: half_shape[grid.axis_index("x")]])
        shape = [1] * (grid.ndim - 1) + [1]
        shape[grid.axis_index("x") - 1] = len(x_half)
        weight = (1.0 / x_half).reshape(shape)
    else:
        weight = 1.0
    i0 = np.sum(plane**2 * weight, axis=tuple(range(grid.ndim - 1))) / (2.0 * h_r)

    if all(s == 1 for s in signs):
        corner = blocks[(m_r - 1,) * 1]
        for _ in range(grid.ndim - 1):
            corner = corner[-1]
        sign_fix = _sector_sign(eigvecs)
        val = corner * sign_fix / np.sqrt(2.0**grid.ndim * grid.cell_volume)
        if form in (CYLINDER_2VAR, CYLINDER_3VAR):
            x0 = abs(grid.points("x")[half_shape[grid.axis_index("x")] - 1])
            val = val / np.sqrt(x0)
        psi0 = val
    else:
        psi0 = np.zeros(n_states)
    return i0, psi0


def _sector_sign(eigvecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(eigvecs), axis=0)
    s = np.sign(eigvecs[idx, np.arange(eigvecs.shape[1])])
    s[s == 0] = 1.0
    return s
