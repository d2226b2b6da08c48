"""First-order dipole-control transition machinery.

The leading transition amplitude into a quasi-collision state is

    |prefactor * E * <f| dV/dq |i> * integral_0^T e^{i delta t} t^2 dt|,

with detuning delta = omega - delta_eps (dimensionless units, hbar = 1:
energies in units of the energy scale, times in its inverse). The t^2
integral has the closed form

    (e^{i delta T} (delta^2 T^2 + 2 i delta T - 2) + 2) / (i delta^3),

verified against adaptive quadrature in the tests; T^3/3 at delta = 0. The
mass/charge bookkeeping of the physical prefactor is folded into a single
dimensionless knob, since resonance location and pulse-duration scaling do
not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec
from .potentials import PotentialSpec, eval_gradient


class ControlError(ValueError):
    """Inconsistent control computation request."""


@dataclass(frozen=True)
class PulseSpec:
    e_field: float
    omega: float
    duration: float

    def __post_init__(self):
        if self.duration <= 0.0:
            raise ControlError("pulse duration must be positive")
        if self.e_field < 0.0:
            raise ControlError("field amplitude must be nonnegative")


@dataclass
class TransitionResult:
    delta_eps: float
    matrix_element: float
    time_integral: complex
    amplitude: float
    prefactor: float
    pulse: PulseSpec


def _measure_weights(grid: GridSpec) -> float:
    return grid.cell_volume


def dipole_matrix_element(
    phi_i: np.ndarray,
    phi_f: np.ndarray,
    grid: GridSpec,
    axis: str = "x",
) -> float:
    """<phi_f| q |phi_i> by grid quadrature, q the chosen coordinate.

    Stored vectors carry the similarity transform, so the plain quadrature
    here is the physical weighted-measure matrix element.
    """
    if phi_i.shape != phi_f.shape or phi_i.shape[0] != grid.total_points:
        raise ControlError("states do not share the operator grid")
    ax = grid.axis_index(axis)
    pts = grid.points(axis)
    shape = [1] * grid.ndim
    shape[ax] = len(pts)
    q = pts.reshape(shape)
    val = np.sum(phi_f.reshape(grid.shape) * q * phi_i.reshape(grid.shape))
    return float(val * _measure_weights(grid) / _norms(phi_i, phi_f, grid))


def gradient_matrix_element(
    phi_i: np.ndarray,
    phi_f: np.ndarray,
    grid: GridSpec,
    pspec: PotentialSpec,
    axis: str = "R",
) -> float:
    """<phi_f| dV/d(axis) |phi_i> with the analytic potential gradient."""
    if phi_i.shape != phi_f.shape or phi_i.shape[0] != grid.total_points:
        raise ControlError("states do not share the operator grid")
    meshes = grid.meshes()
    grads = eval_gradient(pspec, meshes)
    names = [a.name for a in grid.axes]
    dv = grads[names.index(axis)]
    val = np.sum(phi_f.reshape(grid.shape) * dv * phi_i.reshape(grid.shape))
    return float(val * _measure_weights(grid) / _norms(phi_i, phi_f, grid))


def _norms(phi_i, phi_f, grid) -> float:
    w = _measure_weights(grid)
    return float(
        np.sqrt((phi_i @ phi_i) * w) * np.sqrt((phi_f @ phi_f) * w)
    )


def phase_time_integral(delta: float, duration: float) -> complex:
    """integral_0^T exp(i delta t) t^2 dt, closed form.

    Small |delta T| switches to the series to avoid 1/delta^3 cancellation.
    """
    t = duration
    dt = delta * t
    if abs(dt) < 0.1:
        # sum_n (i delta)^n T^(n+3) / (n! (n+3)); n = 10 reaches ~1e-16
        # relative at the switch point, where the closed form cancels badly
        total = 0.0 + 0.0j
        term = t**3  # (i delta)^n t^(n+3) / n!
        for n in range(11):
            total += term / (n + 3)
            term *= 1j * delta * t / (n + 1)
        return total
    ed = np.exp(1j * dt)
    return (ed * (dt * dt + 2j * dt - 2.0) + 2.0) / (1j * delta**3)


def transition_amplitude(
    pulse: PulseSpec,
    delta_eps: float,
    matrix_element: float,
    prefactor: float = 1.0,
) -> TransitionResult:
    """Assemble the first-order amplitude for one pulse."""
    delta = pulse.omega - delta_eps
    ti = phase_time_integral(delta, pulse.duration)
    amp = prefactor * pulse.e_field * abs(matrix_element) * abs(ti)
    return TransitionResult(
        delta_eps=delta_eps,
        matrix_element=matrix_element,
        time_integral=ti,
        amplitude=amp,
        prefactor=prefactor,
        pulse=pulse,
    )


@dataclass
class ResonanceScan:
    rows: list  # (omega, duration, amplitude, delta) tuples
    peak_omega: float
    peak_amplitude: float
    spans_resonance: bool
    warning: str | None = None
    meta: dict = field(default_factory=dict)


def resonance_scan(
    omegas,
    durations,
    delta_eps: float,
    matrix_element: float,
    e_field: float = 1.0,
    prefactor: float = 1.0,
) -> ResonanceScan:
    """Amplitude over an (omega, T) family; peak sits at omega = delta_eps."""
    omegas = np.asarray(list(omegas), dtype=float)
    durations = np.atleast_1d(np.asarray(durations, dtype=float))
    spans = bool(omegas.min() <= delta_eps <= omegas.max())
    rows = []
    for t in durations:
        for w in omegas:
            res = transition_amplitude(
                PulseSpec(e_field=e_field, omega=w, duration=t),
                delta_eps, matrix_element, prefactor,
            )
            rows.append((float(w), float(t), res.amplitude, float(w - delta_eps)))
    t_max = durations.max()
    best = max((r for r in rows if r[1] == t_max), key=lambda r: r[2])
    return ResonanceScan(
        rows=rows,
        peak_omega=best[0],
        peak_amplitude=best[2],
        spans_resonance=spans,
        warning=None if spans else "omega grid does not span the resonance",
        meta={"delta_eps": delta_eps, "matrix_element": matrix_element},
    )


def duration_scaling_exponent(
    durations, delta_eps: float, matrix_element: float
) -> float:
    """Fitted log-log slope of the resonant peak amplitude vs T (expect 3)."""
    durations = np.asarray(list(durations), dtype=float)
    amps = [
        transition_amplitude(
            PulseSpec(e_field=1.0, omega=delta_eps, duration=t),
            delta_eps, matrix_element,
        ).amplitude
        for t in durations
    ]
    slope = np.polyfit(np.log(durations), np.log(amps), 1)[0]
    return float(slope)
