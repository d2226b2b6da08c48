"""Dimensionless Coulomb potentials of the confined three-body problem.

Forms (coordinates are the dimensionless G^2-scaled ones):

* planar_2var / cylinder_2var, point (R, x):
      V = Z/|R| - 2/sqrt(x^2 + R^2/4)
* cylinder_3var, point (R, x, y):
      V = Z/|R| - 1/sqrt(x^2 + (R/2 - y)^2) - 1/sqrt(x^2 + (R/2 + y)^2)
* prolate_fixed_R, point (xi, eta):
      V = (Z - 4 xi / (xi^2 - eta^2)) / 4

R enters through |R| (it is physically a distance; the computational box is
symmetric in R). A softening eps > 0 replaces each 1/sqrt(u) by
1/sqrt(u + eps^2) and Z/|R| by Z/sqrt(R^2 + eps^2); it is a diagnostic knob
only and defaults to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PLANAR_2VAR = "planar_2var"
CYLINDER_2VAR = "cylinder_2var"
CYLINDER_3VAR = "cylinder_3var"
PROLATE_FIXED_R = "prolate_fixed_R"
FORMS = (PLANAR_2VAR, CYLINDER_2VAR, CYLINDER_3VAR, PROLATE_FIXED_R)

# axis names each form expects, in operator order
FORM_AXES = {
    PLANAR_2VAR: ("R", "x"),
    CYLINDER_2VAR: ("R", "x"),
    CYLINDER_3VAR: ("R", "x", "y"),
    PROLATE_FIXED_R: ("xi", "eta"),
}


class SingularPotentialError(ArithmeticError):
    """Evaluation requested exactly on a Coulomb/coordinate singularity."""


@dataclass(frozen=True)
class PotentialSpec:
    z: float
    form: str = PLANAR_2VAR
    softening: float = 0.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown potential form {self.form!r}")
        if self.softening < 0.0:
            raise ValueError("softening must be >= 0")
        # z = 0 is allowed so tests can isolate the attractive term;
        # physical runs use z >= 1.


def _check_point(spec: PotentialSpec, point):
    want = len(FORM_AXES[spec.form])
    if len(point) != want:
        raise ValueError(
            f"form {spec.form} expects {want} coordinates, got {len(point)}"
        )
    return [np.asarray(c, dtype=float) for c in point]


def eval_potential(spec: PotentialSpec, point):
    """Evaluate the dimensionless potential at `point` (scalars or arrays).

    Raises SingularPotentialError when softening is 0 and any sample sits on
    a singular locus.
    """
    eps2 = spec.softening**2
    if spec.form in (PLANAR_2VAR, CYLINDER_2VAR):
        r, x = _check_point(spec, point)
        rep = r * r + eps2
        att = x * x + r * r / 4.0 + eps2
        _guard(rep, att)
        return spec.z / np.sqrt(rep) - 2.0 / np.sqrt(att)
    if spec.form == CYLINDER_3VAR:
        r, x, y = _check_point(spec, point)
        rep = r * r + eps2
        um = x * x + (r / 2.0 - y) ** 2 + eps2
        up = x * x + (r / 2.0 + y) ** 2 + eps2
        _guard(rep, um, up)
        return spec.z / np.sqrt(rep) - 1.0 / np.sqrt(um) - 1.0 / np.sqrt(up)
    xi, eta = _check_point(spec, point)
    denom = xi * xi - eta * eta
    if np.any(denom == 0.0):
        raise SingularPotentialError("prolate potential singular at xi^2 = eta^2")
    return 0.25 * (spec.z - 4.0 * xi / denom)


def eval_gradient(spec: PotentialSpec, point):
    """Analytic gradient of eval_potential, one array per coordinate.

    The |R| kink is handled through the smooth sqrt(R^2 + eps^2) form, so
    the R-derivative is odd in R and exact away from singularities.
    """
    eps2 = spec.softening**2
    if spec.form in (PLANAR_2VAR, CYLINDER_2VAR):
        r, x = _check_point(spec, point)
        rep = r * r + eps2
        att = x * x + r * r / 4.0 + eps2
        _guard(rep, att)
        att32 = att**-1.5
        d_r = -spec.z * r * rep**-1.5 + (r / 2.0) * att32
        d_x = 2.0 * x * att32
        return d_r, d_x
    if spec.form == CYLINDER_3VAR:
        r, x, y = _check_point(spec, point)
        rep = r * r + eps2
        um = x * x + (r / 2.0 - y) ** 2 + eps2
        up = x * x + (r / 2.0 + y) ** 2 + eps2
        _guard(rep, um, up)
        um32, up32 = um**-1.5, up**-1.5
        d_r = -spec.z * r * rep**-1.5 + 0.5 * (r / 2.0 - y) * um32 + 0.5 * (r / 2.0 + y) * up32
        d_x = x * (um32 + up32)
        d_y = -(r / 2.0 - y) * um32 + (r / 2.0 + y) * up32
        return d_r, d_x, d_y
    xi, eta = _check_point(spec, point)
    denom = xi * xi - eta * eta
    if np.any(denom == 0.0):
        raise SingularPotentialError("prolate potential singular at xi^2 = eta^2")
    d_xi = (xi * xi + eta * eta) / denom**2
    d_eta = -2.0 * xi * eta / denom**2
    return d_xi, d_eta


def _guard(*denominators):
    for d in denominators:
        if np.any(d == 0.0):
            raise SingularPotentialError(
                "potential evaluated on a singular locus with softening 0"
            )


def negative_region_half_width(spec: PotentialSpec, r: float) -> float:
    """|x| below which the 2-var potential is negative at fixed R = r.

    Root of V(r, x) = 0: x* = |r| sqrt(4/Z^2 - 1/4); exists for Z < 4.
    """
    if spec.form not in (PLANAR_2VAR, CYLINDER_2VAR):
        raise ValueError("negative-region width is defined for the 2-var forms")
    if not 0.0 < spec.z < 4.0:
        raise ValueError("root exists for 0 < Z < 4")
    return abs(r) * np.sqrt(4.0 / spec.z**2 - 0.25)
