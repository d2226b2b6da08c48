"""Physical constants and the dimensionless <-> physical conversion layer.

All solver-facing quantities are dimensionless: lengths are multiples of
1/G^2 and energies multiples of hbar^2 G^4 / (2 m), where
G^2 = m Z e^2 / (2 hbar^2 pi eps0) for light mass m and heavy charge Z.
Physical units (eV, Angstrom, tesla) appear only in reports.

Constants are CODATA 2018, hardcoded for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass

# CODATA 2018 (SI). e and hbar are exact in the 2019 SI redefinition.
ELEMENTARY_CHARGE = 1.602176634e-19      # C
HBAR = 1.054571817e-34                   # J s
EPSILON_0 = 8.8541878128e-12             # F/m
ELECTRON_MASS = 9.1093837015e-31         # kg
DEUTERON_MASS = 3.3435837724e-27         # kg
EV = ELEMENTARY_CHARGE                   # J per eV

_PI = 3.141592653589793


class InvalidParameterError(ValueError):
    """Raised for non-physical system parameters."""


@dataclass(frozen=True)
class PhysicalSystem:
    """Masses, charges and the derived dimensionless scales.

    Attributes
    ----------
    light_mass, heavy_mass : kg
    charge_number : heavy-particle charge Z in units of e (light particle
        carries charge -1)
    g_squared : inverse length scale, m^-1
    mu : light/heavy mass ratio
    length_scale_m : metres per dimensionless length unit (= 1/G^2)
    energy_scale_j, energy_scale_ev : energy per dimensionless unit
        (= hbar^2 G^4 / 2m)
    """

    light_mass: float
    heavy_mass: float
    charge_number: float
    g_squared: float
    mu: float
    length_scale_m: float
    energy_scale_j: float
    energy_scale_ev: float


def derive_system(light_mass: float, heavy_mass: float, z: float) -> PhysicalSystem:
    """Build a PhysicalSystem from masses (kg) and the heavy charge number."""
    if not (light_mass > 0.0 and heavy_mass > 0.0):
        raise InvalidParameterError("masses must be positive")
    if z < 1.0:
        raise InvalidParameterError(f"charge number must be >= 1, got {z}")
    g2 = light_mass * z * ELEMENTARY_CHARGE**2 / (2.0 * HBAR**2 * _PI * EPSILON_0)
    e_scale = HBAR**2 * g2**2 / (2.0 * light_mass)
    return PhysicalSystem(
        light_mass=light_mass,
        heavy_mass=heavy_mass,
        charge_number=z,
        g_squared=g2,
        mu=light_mass / heavy_mass,
        length_scale_m=1.0 / g2,
        energy_scale_j=e_scale,
        energy_scale_ev=e_scale / EV,
    )


def electron_deuteron_system() -> PhysicalSystem:
    """Reference system: electron light particle, deuteron heavies, Z=1."""
    return derive_system(ELECTRON_MASS, DEUTERON_MASS, 1.0)


def to_ev(e_dimensionless: float, sys: PhysicalSystem) -> float:
    """Dimensionless energy -> eV."""
    return e_dimensionless * sys.energy_scale_ev


def from_ev(e_ev: float, sys: PhysicalSystem) -> float:
    """eV -> dimensionless energy."""
    return e_ev / sys.energy_scale_ev


def to_angstrom(x_dimensionless: float, sys: PhysicalSystem) -> float:
    """Dimensionless length -> Angstrom."""
    return x_dimensionless * sys.length_scale_m * 1e10


def from_angstrom(x_angstrom: float, sys: PhysicalSystem) -> float:
    """Angstrom -> dimensionless length."""
    return x_angstrom * 1e-10 / sys.length_scale_m


def magnetic_field_factor(sys: PhysicalSystem) -> float:
    """Dimensionless factor multiplying a physical B field (per tesla).

    e/(hbar G^4); its square scales the diamagnetic diagonal. Of order
    1.06e-6 for the electron/deuteron system.
    """
    return ELEMENTARY_CHARGE / (HBAR * sys.g_squared**2)


def units_table(sys: PhysicalSystem) -> dict:
    """Conversion summary embedded in run manifests."""
    return {
        "g_squared_per_m": sys.g_squared,
        "length_scale_angstrom": sys.length_scale_m * 1e10,
        "energy_scale_ev": sys.energy_scale_ev,
        "mu": sys.mu,
        "charge_number": sys.charge_number,
        "magnetic_field_factor_per_tesla": magnetic_field_factor(sys),
    }
