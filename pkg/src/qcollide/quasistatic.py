"""Quasi-static (fixed-R) treatment and the effective R-potential.

For each fixed heavy-particle separation R the two-center problem in
prolate spheroidal coordinates is solved as a direct 2-D generalized
eigenproblem A v = lambda W v (weight xi^2 - eta^2); the effective
potential governing the R-motion in the factorized picture is
v_eff = 4 lambda(R) / R. Its steep rise as R -> 0 is the quasi-static
obstruction to quasi-collisions that the full dynamical treatment evades.

The xi box is truncated at xi_max with a Dirichlet wall and doubled until
the lowest eigenvalue is stable, since small R needs a very large xi for a
fixed physical radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolve import solve_lowest_generalized
from .grid import GridSpec, make_box_grid
from .operators import build_prolate_fixed_r


class TruncationError(RuntimeError):
    """xi_max doubling failed to stabilize the lowest eigenvalue."""


@dataclass
class EffectivePotentialCurve:
    r_values: np.ndarray
    lam: np.ndarray        # shape (n_r, beta_count), ascending in beta
    v_eff: np.ndarray      # 4 lam / R elementwise
    xi_max: np.ndarray     # xi_max actually used per R
    truncation_shift: np.ndarray  # last relative shift of lambda_0 per R
    beta_count: int = 1
    z: float = 1.0
    repulsive_at_origin: bool = False
    meta: dict = field(default_factory=dict)


def default_r_grid(r_min: float = 0.05, r_max: float = 20.0, count: int = 40) -> np.ndarray:
    """Logarithmic R scan resolving both the small-R barrier and the plateau."""
    return np.geomspace(r_min, r_max, count)


def _prolate_grid(r: float, xi_max: float, n_xi: int, n_eta: int) -> GridSpec:
    return make_box_grid([("xi", 1.0, xi_max, n_xi), ("eta", -1.0, 1.0, n_eta)])


def lambda_of_r(
    r: float,
    z: float,
    beta_count: int,
    n_xi: int = 96,
    n_eta: int = 40,
    xi_max0: float | None = None,
    seed: int = 0,
    max_doublings: int = 6,
    shift_tol: float = 1e-3,
):
    """Lowest beta_count generalized eigenvalues at fixed R.

    xi_max starts so the physical radius R xi_max / 2 covers five times the
    orbital scale and doubles until the lowest lambda moves by less than
    shift_tol (relative, with an absolute floor near zero crossings).

    Returns (lam, xi_max_used, last_shift).
    """
    if r <= 0.0:
        raise ValueError(f"R must be positive, got {r}")
    orbital = 2.0  # dimensionless Bohr-like scale (a0 = 2 G^2-lengths at Z=1)
    xi_max = xi_max0 if xi_max0 is not None else max(3.0, 10.0 * orbital / r)
    n = n_xi
    prev = None
    for _ in range(max_doublings + 1):
        grid = _prolate_grid(r, xi_max, n, n_eta)
        a_op, w_op = build_prolate_fixed_r(grid, r, z)
        sol = solve_lowest_generalized(a_op, w_op, beta_count, tol=1e-7, seed=seed)
        lam = sol.eigenvalues.copy()
        if prev is not None:
            shift = abs(lam[0] - prev) / max(abs(lam[0]), 1e-2)
            if shift < shift_tol:
                return lam, xi_max, shift
        prev = lam[0]
        # grow the box at fixed spacing so the shift isolates truncation
        xi_max = 1.0 + 2.0 * (xi_max - 1.0)
        n = min(2 * n, 1600)
    raise TruncationError(
        f"lambda(R={r}) not stable after {max_doublings} xi_max doublings"
    )


def effective_potential_scan(
    r_list,
    z: float = 1.0,
    beta_count: int = 4,
    n_xi: int = 96,
    n_eta: int = 40,
    seed: int = 0,
) -> EffectivePotentialCurve:
    """lambda(R) and v_eff(R) curves over an ascending R grid."""
    r_vals = np.asarray(list(r_list), dtype=float)
    if np.any(r_vals <= 0.0) or np.any(np.diff(r_vals) <= 0.0):
        raise ValueError("R values must be positive and strictly ascending")
    lam = np.empty((len(r_vals), beta_count))
    xim = np.empty(len(r_vals))
    shifts = np.empty(len(r_vals))
    for i, r in enumerate(r_vals):
        lam[i], xim[i], shifts[i] = lambda_of_r(
            r, z, beta_count, n_xi=n_xi, n_eta=n_eta, seed=seed
        )
    v_eff = 4.0 * lam / r_vals[:, None]
    v0 = v_eff[:, 0]
    repulsive = bool(v0[0] > v0[1] > v0[2]) if len(r_vals) >= 3 else False
    return EffectivePotentialCurve(
        r_values=r_vals,
        lam=lam,
        v_eff=v_eff,
        xi_max=xim,
        truncation_shift=shifts,
        beta_count=beta_count,
        z=z,
        repulsive_at_origin=repulsive,
        meta={"n_xi": n_xi, "n_eta": n_eta, "seed": seed},
    )
