import math

import pytest
from hypothesis import given, strategies as st

from qcollide import units
from qcollide.units import (
    DEUTERON_MASS,
    ELECTRON_MASS,
    InvalidParameterError,
    derive_system,
    electron_deuteron_system,
    from_angstrom,
    from_ev,
    magnetic_field_factor,
    to_angstrom,
    to_ev,
)

# independent anchors (CODATA 2018)
BOHR_RADIUS_M = 0.529177210903e-10
HARTREE_EV = 27.211386245988


@pytest.fixture(scope="module")
def deuteron():
    return electron_deuteron_system()


def test_g_squared_anchor(deuteron):
    assert deuteron.g_squared == pytest.approx(0.3779e11, rel=1e-3)


def test_inverse_g_squared_in_angstrom(deuteron):
    assert to_angstrom(1.0, deuteron) == pytest.approx(0.2646, rel=1e-3)


def test_energy_scale_anchor(deuteron):
    assert to_ev(1.0, deuteron) == pytest.approx(54.4, rel=1e-3)


def test_mass_ratio_anchor(deuteron):
    assert deuteron.mu == pytest.approx(0.00027, rel=2e-2)


def test_energy_example_conversion(deuteron):
    assert to_ev(2.8, deuteron) == pytest.approx(152.3, rel=1e-3)
    assert to_ev(0.0, deuteron) == 0.0


def test_box_size_conversion(deuteron):
    # a 30-unit box is roughly 8 Angstrom wide
    assert to_angstrom(30.0, deuteron) == pytest.approx(7.94, abs=0.01)
    assert to_angstrom(0.0, deuteron) == 0.0


def test_equal_masses_gives_mu_one():
    sys = derive_system(ELECTRON_MASS, ELECTRON_MASS, 1.0)
    assert sys.mu == 1.0


def test_bohr_and_hartree_consistency(deuteron):
    # Z=1, electron: length scale = a0/2, energy scale = 2 Hartree
    assert deuteron.length_scale_m == pytest.approx(BOHR_RADIUS_M / 2, rel=1e-3)
    assert deuteron.energy_scale_ev == pytest.approx(2 * HARTREE_EV, rel=1e-3)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_ev_round_trip(e):
    sys = electron_deuteron_system()
    assert to_ev(from_ev(e, sys), sys) == pytest.approx(e, rel=1e-14, abs=1e-14)


@given(st.floats(min_value=-1e4, max_value=1e4, allow_nan=False))
def test_angstrom_round_trip(x):
    sys = electron_deuteron_system()
    assert to_angstrom(from_angstrom(x, sys), sys) == pytest.approx(x, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("light,heavy,z", [
    (-1.0, DEUTERON_MASS, 1.0),
    (ELECTRON_MASS, 0.0, 1.0),
    (ELECTRON_MASS, DEUTERON_MASS, 0.0),
    (ELECTRON_MASS, DEUTERON_MASS, 0.5),
])
def test_invalid_parameters(light, heavy, z):
    with pytest.raises(InvalidParameterError):
        derive_system(light, heavy, z)


def test_magnetic_field_factor_order(deuteron):
    assert magnetic_field_factor(deuteron) == pytest.approx(1.06e-6, rel=5e-2)


def test_z_scaling():
    s1 = derive_system(ELECTRON_MASS, DEUTERON_MASS, 1.0)
    s2 = derive_system(ELECTRON_MASS, DEUTERON_MASS, 2.0)
    assert s2.g_squared == pytest.approx(2 * s1.g_squared, rel=1e-14)
    assert s2.energy_scale_ev == pytest.approx(4 * s1.energy_scale_ev, rel=1e-14)


def test_units_table_keys(deuteron):
    table = units.units_table(deuteron)
    assert math.isclose(table["energy_scale_ev"], deuteron.energy_scale_ev)
    assert set(table) >= {"g_squared_per_m", "length_scale_angstrom", "mu"}
