import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qcollide.control import (
    ControlError,
    PulseSpec,
    dipole_matrix_element,
    duration_scaling_exponent,
    gradient_matrix_element,
    phase_time_integral,
    resonance_scan,
    transition_amplitude,
)
from qcollide.eigensolve import dense_oracle
from qcollide.grid import make_box_grid
from qcollide.operators import build_hamiltonian
from qcollide.potentials import PotentialSpec, eval_potential
from qcollide.analysis import parity_under_reflection


def _quad_integral(delta, t_end):
    re = quad(lambda t: t * t * np.cos(delta * t), 0, t_end, limit=400)[0]
    im = quad(lambda t: t * t * np.sin(delta * t), 0, t_end, limit=400)[0]
    return re + 1j * im


def test_time_integral_at_resonance():
    t = 7.3
    assert phase_time_integral(0.0, t) == pytest.approx(t**3 / 3.0, rel=1e-14)


@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_time_integral_against_quadrature(delta_t):
    t = 2.37
    delta = delta_t / t
    closed = phase_time_integral(delta, t)
    reference = _quad_integral(delta, t)
    assert abs(closed - reference) <= 1e-10 * max(1.0, abs(reference))


def test_time_integral_series_switch_continuity():
    # both branches must agree with quadrature right at the switch point
    t = 5.0
    for dt in (0.099, 0.101):
        val = phase_time_integral(dt / t, t)
        ref = _quad_integral(dt / t, t)
        assert abs(val - ref) <= 1e-12 * abs(ref)


def test_amplitude_linear_in_field():
    r1 = transition_amplitude(PulseSpec(1.0, 2.0, 10.0), 2.0, 0.5)
    r2 = transition_amplitude(PulseSpec(2.0, 2.0, 10.0), 2.0, 0.5)
    assert r2.amplitude == pytest.approx(2.0 * r1.amplitude, rel=1e-14)


def test_resonant_amplitude_consistency():
    pulse = PulseSpec(e_field=1.7, omega=3.0, duration=12.0)
    res = transition_amplitude(pulse, 3.0, 0.25, prefactor=2.0)
    assert res.amplitude * 3.0 / pulse.duration**3 == pytest.approx(
        2.0 * 1.7 * 0.25, rel=1e-12)


def test_duration_scaling_exponent_is_cubic():
    slope = duration_scaling_exponent(np.geomspace(10.0, 100.0, 8), 1.5, 0.3)
    assert abs(slope - 3.0) <= 0.05


def test_off_resonance_envelope_decays_like_inverse_delta():
    t = 20.0
    deltas = np.array([25.0, 50.0, 100.0])  # delta*T = 500..2000
    mags = np.array([abs(phase_time_integral(d, t)) for d in deltas])
    assert np.all(np.diff(mags) < 0)
    ratios = mags * deltas / t**2
    assert np.all(np.abs(ratios - 1.0) < 0.15)


def test_resonance_scan_peak_location():
    delta_eps = 2.5
    omegas = np.linspace(1.5, 3.5, 41)
    scan = resonance_scan(omegas, [40.0], delta_eps, 0.3)
    step = omegas[1] - omegas[0]
    assert abs(scan.peak_omega - delta_eps) <= step
    assert scan.spans_resonance
    assert scan.warning is None


def test_resonance_scan_warns_when_missing_resonance():
    scan = resonance_scan(np.linspace(5.0, 6.0, 11), [10.0], 2.5, 0.3)
    assert not scan.spans_resonance
    assert scan.warning is not None


def test_pulse_validation():
    with pytest.raises(ControlError):
        PulseSpec(1.0, 1.0, -1.0)
    with pytest.raises(ControlError):
        PulseSpec(-1.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def small_spectrum():
    grid = make_box_grid([("R", -8.0, 8.0, 20), ("x", -8.0, 8.0, 20)])
    op = build_hamiltonian("planar_2var", grid, 0.05, 1.0)
    sol = dense_oracle(op, 60)
    return grid, sol


def test_phase_invariance(small_spectrum):
    grid, sol = small_spectrum
    a, b = sol.eigenvectors[:, 0], sol.eigenvectors[:, 5]
    m1 = abs(dipole_matrix_element(a, b, grid, "x"))
    m2 = abs(dipole_matrix_element(-a, b, grid, "x"))
    assert m1 == m2


def test_dipole_parity_selection(small_spectrum):
    grid, sol = small_spectrum
    checked_zero = checked_nonzero = 0
    for j in range(12):
        phi = sol.eigenvectors[:, j]
        px = parity_under_reflection(phi, grid, "x")
        if abs(px) > 0.99:  # definite x-parity
            assert abs(dipole_matrix_element(phi, phi, grid, "x")) < 1e-10
            checked_zero += 1
        for k in range(j + 1, 12):
            psi = sol.eigenvectors[:, k]
            pk = parity_under_reflection(psi, grid, "x")
            if abs(px) > 0.99 and abs(pk) > 0.99 and px * pk > 0:
                assert abs(dipole_matrix_element(phi, psi, grid, "x")) < 1e-10
            elif abs(px) > 0.99 and abs(pk) > 0.99:
                checked_nonzero += 1
    assert checked_zero >= 5 and checked_nonzero >= 5


def test_gradient_parity_selection(small_spectrum):
    grid, sol = small_spectrum
    pspec = PotentialSpec(z=1.0, form="planar_2var")
    # dV/dR is R-odd: it cannot couple two states of equal definite R-parity
    pairs_zero = 0
    for j in range(10):
        for k in range(j, 10):
            pj = parity_under_reflection(sol.eigenvectors[:, j], grid, "R")
            pk = parity_under_reflection(sol.eigenvectors[:, k], grid, "R")
            if abs(pj) > 0.99 and abs(pk) > 0.99 and pj * pk > 0:
                el = gradient_matrix_element(
                    sol.eigenvectors[:, j], sol.eigenvectors[:, k], grid,
                    pspec, axis="R")
                assert abs(el) < 1e-10
                pairs_zero += 1
    assert pairs_zero >= 8


def test_gradient_hermiticity(small_spectrum):
    grid, sol = small_spectrum
    pspec = PotentialSpec(z=1.0, form="planar_2var")
    a, b = sol.eigenvectors[:, 1], sol.eigenvectors[:, 4]
    m_if = gradient_matrix_element(a, b, grid, pspec, axis="R")
    m_fi = gradient_matrix_element(b, a, grid, pspec, axis="R")
    assert m_if == pytest.approx(m_fi, abs=1e-10)


def test_gradient_element_against_numeric_gradient(small_spectrum):
    # independent route: finite-difference the potential on a fine stencil
    grid, sol = small_spectrum
    pspec = PotentialSpec(z=1.0, form="planar_2var")
    a, b = sol.eigenvectors[:, 0], sol.eigenvectors[:, 3]
    analytic = gradient_matrix_element(a, b, grid, pspec, axis="R")
    r_mesh, x_mesh = grid.meshes()
    h = 1e-6
    dv = (eval_potential(pspec, (r_mesh + h, x_mesh))
          - eval_potential(pspec, (r_mesh - h, x_mesh))) / (2 * h)
    # a, b are l2-normalized, so the measure factors cancel in the ratio
    numeric = float(np.sum(b.reshape(grid.shape) * dv * a.reshape(grid.shape)))
    assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-10)


def test_grid_mismatch_rejected(small_spectrum):
    grid, sol = small_spectrum
    other = np.zeros(10)
    with pytest.raises(ControlError):
        dipole_matrix_element(sol.eigenvectors[:, 0], other, grid)


def test_quasi_collision_final_state_suppresses_dipole_route():
    # the coordinate operator vanishes at the collision region, so for a
    # quasi-collision target the dipole element is suppressed relative to
    # the potential-gradient element (both measured against the typical
    # magnitude over ordinary final states of the same parity)
    from qcollide.analysis import classify_spectrum
    from qcollide.units import electron_deuteron_system

    grid = make_box_grid([("R", -15.0, 15.0, 60), ("x", -15.0, 15.0, 60)])
    op = build_hamiltonian("planar_2var", grid, 0.00027, 1.0)
    sol = dense_oracle(op, 420)
    rep = classify_spectrum(sol, grid, electron_deuteron_system(), "planar_2var")
    assert rep.first_qc_index is not None
    i_state = sol.eigenvectors[:, 0]
    pspec = PotentialSpec(z=1.0, form="planar_2var")
    n_r = grid.shape[0]

    def plane_weight(v):
        psi = v.reshape(grid.shape)
        return float(np.sum(psi[n_r // 2 - 1] ** 2 + psi[n_r // 2] ** 2))

    parities = np.array([
        parity_under_reflection(sol.eigenvectors[:, k], grid, "R")
        for k in range(sol.k)
    ])
    odd = [k for k in range(1, sol.k) if parities[k] < -0.99]
    # the collision target: the R-odd state hugging the R = 0 planes
    # (the odd twin of the flagged quasi-collision state)
    f_qc = max(odd, key=lambda k: plane_weight(sol.eigenvectors[:, k]))
    assert plane_weight(sol.eigenvectors[:, f_qc]) > 0.9
    ordinary = [k for k in odd
                if plane_weight(sol.eigenvectors[:, k]) < 0.5][:40]
    assert len(ordinary) >= 10

    def rel(fn):
        target = abs(fn(sol.eigenvectors[:, f_qc]))
        typical = np.median([abs(fn(sol.eigenvectors[:, j])) for j in ordinary])
        return target / typical

    rel_dipole = rel(lambda v: dipole_matrix_element(i_state, v, grid, "R"))
    rel_grad = rel(lambda v: gradient_matrix_element(i_state, v, grid, pspec, "R"))
    assert rel_dipole < rel_grad
