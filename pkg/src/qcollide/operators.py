"""Assembly of the dimensionless Hamiltonians as symmetric sparse matrices.

Kinetic pieces
--------------
* Plain second derivatives use the 5-point fourth-order stencil
  (-1, 16, -30, 16, -1)/(12 h^2). Dirichlet walls are closed by odd-
  reflection ghosts (psi(ghost) = -psi(mirror)), which keeps the matrix
  exactly symmetric and makes particle-in-a-box eigenvalues equal to the
  stencil symbol (clean fourth order).
* The cylindrical radial term -(1/x) d/dx (x d/dx) is the positive flux
  form Dt diag(|x|_mid) D (staggered first derivative, half-weight at
  Dirichlet walls), symmetrized by the discrete sqrt|x| similarity: the
  stored vector is phi = sqrt|x| psi. The similarity is applied at the
  matrix level, so the operator stays bounded below (the naive continuum
  form -d2 - 1/(4 x^2) is not, on a grid that couples across x = 0).
* The prolate self-adjoint forms d(xi^2-1)d and d(1-eta^2)d use the same
  flux construction with a fourth-order interior staggered derivative
  (5-point interior rows). Coordinate-singular walls (xi=1, |eta|=1) have
  zero flux weight, which implements the regularity condition; the xi_max
  wall is a genuine Dirichlet truncation.

Only the upper triangle (i <= j) is stored, so symmetry is exact by
construction.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .grid import CELL_CENTERED, NODE_CENTERED, Axis, GridSpec
from .potentials import (
    CYLINDER_2VAR,
    CYLINDER_3VAR,
    FORM_AXES,
    PLANAR_2VAR,
    PotentialSpec,
    SingularPotentialError,
    eval_potential,
)
from .units import PhysicalSystem, magnetic_field_factor


class OperatorError(ValueError):
    """Inconsistent operator construction request."""


# ---------------------------------------------------------------------------
# sparse container


@dataclass
class SparseOperator:
    """Symmetric sparse matrix; only entries with row <= col are stored."""

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    grid: GridSpec | None = None
    metadata: dict = field(default_factory=dict)
    _csr: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    @property
    def nnz_upper(self) -> int:
        return len(self.vals)

    def to_csr(self) -> sp.csr_matrix:
        """Full symmetric CSR form (cached)."""
        if self._csr is None:
            upper = sp.coo_matrix(
                (self.vals, (self.rows, self.cols)),
                shape=(self.dimension, self.dimension),
            ).tocsr()
            strict = sp.triu(upper, k=1)
            self._csr = (upper + strict.T).tocsr()
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def diagonal(self) -> np.ndarray:
        return self.to_csr().diagonal()


def _from_csr_upper(m: sp.spmatrix, grid, metadata) -> SparseOperator:
    upper = sp.triu(m.tocoo(), k=0).tocoo()
    # deduplicate and drop explicit zeros for a canonical triplet list
    upper.sum_duplicates()
    upper.eliminate_zeros()
    order = np.lexsort((upper.col, upper.row))
    return SparseOperator(
        dimension=m.shape[0],
        rows=upper.row[order].astype(np.int64),
        cols=upper.col[order].astype(np.int64),
        vals=upper.data[order].astype(float),
        grid=grid,
        metadata=metadata,
    )


def apply(op: SparseOperator, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product op @ v with a fixed reduction order."""
    v = np.asarray(v)
    if v.shape[0] != op.dimension:
        raise OperatorError(
            f"vector length {v.shape[0]} does not match dimension {op.dimension}"
        )
    return op.to_csr() @ v


# ---------------------------------------------------------------------------
# 1-D building blocks (dense n x n, n is small; assembly krons them)


def second_derivative_1d(n: int, h: float, policy: str = CELL_CENTERED) -> np.ndarray:
    """Matrix of -d2/dq2 with Dirichlet walls, 5-point interior stencil."""
    c0 = 30.0 / (12.0 * h * h)
    c1 = -16.0 / (12.0 * h * h)
    c2 = 1.0 / (12.0 * h * h)
    k = (
        np.diag(np.full(n, c0))
        + np.diag(np.full(n - 1, c1), 1)
        + np.diag(np.full(n - 1, c1), -1)
        + np.diag(np.full(n - 2, c2), 2)
        + np.diag(np.full(n - 2, c2), -2)
    )
    if policy == CELL_CENTERED:
        # ghosts: psi(-1) = -psi(0), psi(-2) = -psi(1) about each wall
        k[0, 0] -= c1
        k[0, 1] -= c2
        k[1, 0] -= c2
        k[n - 1, n - 1] -= c1
        k[n - 1, n - 2] -= c2
        k[n - 2, n - 1] -= c2
    elif policy == NODE_CENTERED:
        # wall is a lattice node with psi = 0; ghost psi(-1) = -psi(+1)
        k[0, 0] -= c2
        k[n - 1, n - 1] -= c2
    else:
        raise OperatorError(f"unknown policy {policy!r}")
    return k


def staggered_derivative_1d(n: int, h: float, order: int = 2) -> np.ndarray:
    """(n+1) x n first derivative at cell walls, odd ghosts at domain walls.

    order=4 uses the 27/24 staggered stencil on interior walls j in [2, n-2]
    and falls back to the 2-point form elsewhere.
    """
    d = np.zeros((n + 1, n))
    for j in range(n + 1):
        if order == 4 and 2 <= j <= n - 2:
            stencil = (
                (j - 2, 1.0 / (24.0 * h)),
                (j - 1, -27.0 / (24.0 * h)),
                (j, 27.0 / (24.0 * h)),
                (j + 1, -1.0 / (24.0 * h)),
            )
        else:
            stencil = ((j - 1, -1.0 / h), (j, 1.0 / h))
        for idx, c in stencil:
            if 0 <= idx < n:
                d[j, idx] += c
            elif idx == -1:
                d[j, 0] -= c
            elif idx == n:
                d[j, n - 1] -= c
    return d


def flux_form_1d(p_mid: np.ndarray, n: int, h: float, order: int = 2) -> np.ndarray:
    """Symmetric PSD matrix of -d/dq (p(q) d/dq) with Dirichlet walls.

    p_mid are the coefficient values at the n+1 cell walls; wall weights are
    halved (the wall flux controls only half a cell). A zero p at a wall
    turns the condition into the natural (regularity) one.
    """
    d = staggered_derivative_1d(n, h, order=order)
    w = np.asarray(p_mid, dtype=float).copy()
    if len(w) != n + 1:
        raise OperatorError("need n+1 midpoint coefficient values")
    w[0] *= 0.5
    w[-1] *= 0.5
    return d.T @ (w[:, None] * d)


def radial_kinetic_1d(axis: Axis) -> np.ndarray:
    """Symmetrized -(1/|x|) d(|x| d/dx) on a cell-centered symmetric axis.

    Returns the matrix acting on phi = sqrt|x| psi (discrete similarity of
    the flux form; spectrum identical to the weighted-measure operator).
    """
    if axis.policy != CELL_CENTERED:
        raise OperatorError("radial term requires a cell_centered axis")
    pts = axis.points()
    if np.any(pts == 0.0):
        raise SingularPotentialError("radial axis has a stored point at x = 0")
    mids = np.abs(axis.midpoints())
    k = flux_form_1d(mids, axis.n, axis.spacing, order=2)
    s = 1.0 / np.sqrt(np.abs(pts))
    return s[:, None] * k * s[None, :]


# ---------------------------------------------------------------------------
# assembly


def axis_kinetic_matrices(form: str, grid: GridSpec, mu: float) -> list[np.ndarray]:
    """Per-axis 1-D kinetic matrices (including coefficients) in axis order."""
    mats = []
    for ax in grid.axes:
        if ax.name == "R":
            mats.append(8.0 * mu * second_derivative_1d(ax.n, ax.spacing, ax.policy))
        elif ax.name == "x" and form in (CYLINDER_2VAR, CYLINDER_3VAR):
            mats.append(radial_kinetic_1d(ax))
        elif ax.name in ("x", "y"):
            mats.append(second_derivative_1d(ax.n, ax.spacing, ax.policy))
        else:
            raise OperatorError(f"axis {ax.name!r} not valid for form {form!r}")
    return mats


def _kron_sum(mats: list[np.ndarray]) -> sp.csr_matrix:
    """sum_a I x ... x mats[a] x ... x I as sparse CSR."""
    sizes = [m.shape[0] for m in mats]
    total = None
    for a, m in enumerate(mats):
        left = int(np.prod(sizes[:a])) if a else 1
        right = int(np.prod(sizes[a + 1:])) if a + 1 < len(sizes) else 1
        term = sp.kron(
            sp.kron(sp.identity(left, format="csr"), sp.csr_matrix(m), format="csr"),
            sp.identity(right, format="csr"),
            format="csr",
        )
        total = term if total is None else total + term
    return total.tocsr()


def assemble_operator(
    grid: GridSpec,
    kinetic_1d: list[np.ndarray],
    diagonal: np.ndarray | None,
    metadata: dict | None = None,
) -> SparseOperator:
    """Kronecker-sum the per-axis kinetic matrices and add a diagonal."""
    if len(kinetic_1d) != grid.ndim:
        raise OperatorError("one kinetic matrix per axis required")
    h = _kron_sum(kinetic_1d)
    if diagonal is not None:
        diagonal = np.asarray(diagonal, dtype=float).reshape(-1)
        if len(diagonal) != grid.total_points:
            raise OperatorError("diagonal length does not match grid")
        if not np.all(np.isfinite(diagonal)):
            raise SingularPotentialError("non-finite potential sample on the grid")
        h = h + sp.diags(diagonal)
    return _from_csr_upper(h, grid, metadata or {})


@dataclass(frozen=True)
class MagneticSpec:
    """Static uniform field driving the diamagnetic diagonal term.

    field_factor is the per-tesla dimensionless factor e/(hbar G^4) of the
    underlying physical system; the diagonal added is

        field_factor^2 ( x^2 (Bz^2 + By^2)/4 + Z^2 mu R^2 (Bz^2 + Bx^2)/4 ).
    """

    b_field: tuple[float, float, float]
    field_factor: float

    @staticmethod
    def from_system(b_field, sys: PhysicalSystem) -> "MagneticSpec":
        bx, by, bz = (float(b) for b in b_field)
        return MagneticSpec((bx, by, bz), magnetic_field_factor(sys))


def diamagnetic_diagonal(
    grid: GridSpec, magnetic: MagneticSpec, z: float, mu: float
) -> np.ndarray:
    bx, by, bz = magnetic.b_field
    f2 = magnetic.field_factor**2
    meshes = grid.meshes()
    r_mesh = meshes[grid.axis_index("R")]
    x_mesh = meshes[grid.axis_index("x")]
    diag = f2 * (
        0.25 * x_mesh**2 * (bz**2 + by**2)
        + 0.25 * z**2 * mu * r_mesh**2 * (bz**2 + bx**2)
    )
    return diag.reshape(-1)


def build_hamiltonian(
    form: str,
    grid: GridSpec,
    mu: float,
    z: float,
    magnetic: MagneticSpec | None = None,
    softening: float = 0.0,
    potential_override=None,
) -> SparseOperator:
    """Assemble the dimensionless Hamiltonian of the requested form.

    potential_override, when given, is called with the coordinate meshes and
    must return the diagonal potential samples (used by discretization tests
    to zero out the potential); otherwise the form's Coulomb potential is
    evaluated on the grid.
    """
    if mu <= 0.0:
        raise OperatorError(f"mass ratio mu must be positive, got {mu}")
    if mu > 1.0:
        raise OperatorError(f"mass ratio mu must be <= 1, got {mu}")
    if mu == 1.0:
        warnings.warn("mu = 1 (equal masses) is far outside the mu << 1 regime",
                      stacklevel=2)
    want = FORM_AXES.get(form)
    if want is None or want == ("xi", "eta"):
        raise OperatorError(f"unsupported Hamiltonian form {form!r}")
    names = tuple(a.name for a in grid.axes)
    if names != want:
        raise OperatorError(f"form {form!r} expects axes {want}, grid has {names}")

    kin = axis_kinetic_matrices(form, grid, mu)
    meshes = grid.meshes()
    if potential_override is not None:
        diag = np.asarray(potential_override(*meshes), dtype=float)
    else:
        pspec = PotentialSpec(z=z, form=form, softening=softening)
        diag = eval_potential(pspec, meshes)
    diag = np.broadcast_to(diag, grid.shape).reshape(-1).copy()
    if magnetic is not None:
        diag += diamagnetic_diagonal(grid, magnetic, z, mu)

    meta = {
        "form": form,
        "mu": mu,
        "z": z,
        "softening": softening,
        "b_field": None if magnetic is None else list(magnetic.b_field),
    }
    return assemble_operator(grid, kin, diag, meta)


def build_prolate_fixed_r(
    grid: GridSpec, r: float, z: float, alpha: int = 0
) -> tuple[SparseOperator, SparseOperator]:
    """Generalized pair (A, W) of the fixed-R prolate-spheroidal problem.

    A v = lambda W v reproduces the fixed-R eigenproblem after multiplying
    through by the (xi^2 - eta^2) volume factor:

        A = [ -d/dxi (xi^2-1) d/dxi - d/deta (1-eta^2) d/deta ] / R
            + (Z (xi^2 - eta^2) - 4 xi) / 4,
        W = diag(xi^2 - eta^2)  (positive since xi > 1 >= |eta|).

    Only the angular-symmetric sector alpha = 0 is supported.
    """
    if alpha != 0:
        raise OperatorError("only the alpha = 0 angular sector is in scope")
    if r <= 0.0:
        raise OperatorError(f"fixed separation R must be positive, got {r}")
    names = tuple(a.name for a in grid.axes)
    if names != ("xi", "eta"):
        raise OperatorError(f"prolate grid must have axes (xi, eta), got {names}")
    ax_xi, ax_eta = grid.axes
    xi = ax_xi.points()
    eta = ax_eta.points()
    if ax_xi.lo < 1.0 or np.any(xi <= 1.0):
        raise OperatorError("xi axis must start at or above the xi = 1 focus line")
    if ax_eta.lo < -1.0 or ax_eta.hi > 1.0 or np.any(np.abs(eta) >= 1.0):
        raise OperatorError("eta axis must lie strictly inside (-1, 1)")

    xim = ax_xi.midpoints()
    etam = ax_eta.midpoints()
    k_xi = flux_form_1d(xim**2 - 1.0, ax_xi.n, ax_xi.spacing, order=4)
    k_eta = flux_form_1d(1.0 - etam**2, ax_eta.n, ax_eta.spacing, order=4)
    kin = _kron_sum([k_xi, k_eta]) / r

    xi_m, eta_m = grid.meshes()
    weight = (xi_m**2 - eta_m**2).reshape(-1)
    pot = 0.25 * (z * (xi_m**2 - eta_m**2) - 4.0 * xi_m).reshape(-1)

    meta = {"form": "prolate_fixed_R", "r": r, "z": z, "alpha": alpha}
    a_op = _from_csr_upper(kin + sp.diags(pot), grid, meta)
    w_op = _from_csr_upper(sp.diags(weight), grid, {"form": "prolate_weight", "r": r})
    return a_op, w_op


# ---------------------------------------------------------------------------
# triplet dump / load

_HEADER_FMT = "<4sqq"
_MAGIC = b"QCO1"


def dump_triplets(op: SparseOperator, path, binary: bool = False) -> None:
    """Write the upper-triangle triplets to a documented file.

    Text: header lines '# dimension N', '# nnz M', '# key=value' metadata,
    then one 'row col value' triple per line. Binary: little-endian magic
    'QCO1', int64 dimension, int64 nnz, then nnz records of
    (int64 row, int64 col, float64 value).
    """
    if binary:
        with open(path, "wb") as f:
            f.write(struct.pack(_HEADER_FMT, _MAGIC, op.dimension, op.nnz_upper))
            rec = np.rec.fromarrays(
                [op.rows.astype("<i8"), op.cols.astype("<i8"), op.vals.astype("<f8")],
                names="row,col,val",
            )
            f.write(rec.tobytes())
        return
    with open(path, "w") as f:
        f.write(f"# dimension {op.dimension}\n")
        f.write(f"# nnz {op.nnz_upper}\n")
        for key, val in sorted(op.metadata.items()):
            f.write(f"# {key}={val}\n")
        for i, j, v in zip(op.rows, op.cols, op.vals):
            f.write(f"{i} {j} {v:.17e}\n")


def load_triplets(path) -> SparseOperator:
    """Read an operator written by dump_triplets (either format)."""
    with open(path, "rb") as f:
        head = f.read(struct.calcsize(_HEADER_FMT))
        if head[:4] == _MAGIC:
            _, dim, nnz = struct.unpack(_HEADER_FMT, head)
            rec = np.frombuffer(
                f.read(), dtype=[("row", "<i8"), ("col", "<i8"), ("val", "<f8")]
            )
            if len(rec) != nnz:
                raise OperatorError("truncated binary triplet file")
            return SparseOperator(
                dimension=int(dim),
                rows=rec["row"].astype(np.int64),
                cols=rec["col"].astype(np.int64),
                vals=rec["val"].astype(float),
            )
    dim = None
    rows, cols, vals = [], [], []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# dimension"):
                    dim = int(line.split()[-1])
                continue
            i, j, v = line.split()
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
    if dim is None:
        raise OperatorError("missing dimension header in triplet file")
    return SparseOperator(
        dimension=dim,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=float),
    )
