import numpy as np
import pytest
import scipy.sparse as sp
from scipy.special import jn_zeros

from qcollide.eigensolve import dense_oracle, dense_oracle_generalized
from qcollide.grid import Axis, make_box_grid
from qcollide.operators import (
    MagneticSpec,
    OperatorError,
    apply,
    assemble_operator,
    build_hamiltonian,
    build_prolate_fixed_r,
    diamagnetic_diagonal,
    dump_triplets,
    load_triplets,
    radial_kinetic_1d,
    second_derivative_1d,
)
from qcollide.potentials import SingularPotentialError
from qcollide.units import electron_deuteron_system  # noqa: F401 (fixtures below)

PI2 = np.pi**2


def _box_1d(n, policy="node_centered"):
    return make_box_grid([("x", 0.0, 1.0, n)], policy=policy)


def _lowest_box_eigenvalue(n, policy="node_centered"):
    grid = _box_1d(n, policy)
    op = assemble_operator(
        grid,
        [second_derivative_1d(n, grid.axes[0].spacing, policy)],
        np.zeros(n),
    )
    return dense_oracle(op, 1).eigenvalues[0]


def test_particle_in_box_fourth_order_value():
    lam = _lowest_box_eigenvalue(50)
    h = 1.0 / 51
    assert abs(lam - PI2) < 30.0 * h**4


@pytest.mark.parametrize("policy", ["node_centered", "cell_centered"])
def test_particle_in_box_convergence_order(policy):
    ns = [25, 50, 100, 200]
    errs, hs = [], []
    for n in ns:
        lam = _lowest_box_eigenvalue(n, policy)
        errs.append(abs(lam - PI2))
        hs.append(1.0 / (n + 1) if policy == "node_centered" else 1.0 / n)
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(order - 4.0) <= 0.3


def test_box_eigenvalues_match_stencil_symbol():
    # with reflection-ghost walls the discrete eigenvalues are exactly the
    # 5-point symbol evaluated at the sine wavenumbers
    n = 40
    h = 1.0 / (n + 1)
    grid = _box_1d(n)
    op = assemble_operator(
        grid, [second_derivative_1d(n, h, "node_centered")], np.zeros(n))
    sol = dense_oracle(op, 5)
    for k in range(1, 6):
        theta = k * np.pi * h
        symbol = (30 - 32 * np.cos(theta) + 2 * np.cos(2 * theta)) / (12 * h * h)
        assert sol.eigenvalues[k - 1] == pytest.approx(symbol, rel=1e-12)


def test_planar_operator_shape_and_symmetry():
    grid = make_box_grid([("R", -15, 15, 148), ("x", -15, 15, 148)])
    op = build_hamiltonian("planar_2var", grid, 0.00027, 1.0)
    assert op.dimension == 21904
    assert np.all(op.rows <= op.cols)  # upper triangle storage
    m = op.to_csr()
    assert (m - m.T).nnz == 0  # exact symmetry
    # interior row: 5-point in each of two axes plus shared diagonal
    row = m.getrow(74 * 148 + 74)
    assert row.nnz == 9


def test_apply_reproduces_columns_and_symmetry(rng):
    grid = make_box_grid([("R", -4, 4, 10), ("x", -4, 4, 10)])
    op = build_hamiltonian("planar_2var", grid, 0.1, 1.0)
    dense = op.to_dense()
    e7 = np.zeros(op.dimension)
    e7[7] = 1.0
    assert np.allclose(apply(op, e7), dense[:, 7])
    for _ in range(50):
        u = rng.standard_normal(op.dimension)
        v = rng.standard_normal(op.dimension)
        left = u @ apply(op, v)
        right = apply(op, u) @ v
        assert abs(left - right) <= 1e-12 * max(abs(left), abs(right), 1.0)


def test_apply_length_mismatch():
    grid = make_box_grid([("R", -4, 4, 8), ("x", -4, 4, 8)])
    op = build_hamiltonian("planar_2var", grid, 0.1, 1.0)
    with pytest.raises(OperatorError):
        apply(op, np.zeros(5))


def test_matvec_performance_budget():
    import time

    grid = make_box_grid([("R", -15, 15, 148), ("x", -15, 15, 148)])
    op = build_hamiltonian("planar_2var", grid, 0.00027, 1.0)
    v = np.random.default_rng(0).standard_normal(op.dimension)
    apply(op, v)  # build + cache CSR
    t0 = time.perf_counter()
    for _ in range(10):
        v = apply(op, v)
    dt = (time.perf_counter() - t0) / 10
    assert dt < 0.25  # generous for a ~2e5-nnz matvec


def test_magnetic_zero_field_is_identity():
    grid = make_box_grid([("R", -4, 4, 12), ("x", -4, 4, 12)])
    sys = electron_deuteron_system()
    bare = build_hamiltonian("planar_2var", grid, 0.01, 1.0)
    mag = build_hamiltonian("planar_2var", grid, 0.01, 1.0,
                            magnetic=MagneticSpec.from_system((0, 0, 0), sys))
    assert np.array_equal(bare.vals, mag.vals)


def test_diamagnetic_diagonal_nonnegative_and_monotone():
    grid = make_box_grid([("R", -4, 4, 12), ("x", -4, 4, 12)])
    # exaggerated field so the shift clears double-precision noise
    mspec = MagneticSpec((2.0e5, 1.0e5, 3.0e5), 1.0e-6)
    diag = diamagnetic_diagonal(grid, mspec, z=1.0, mu=0.01)
    assert np.all(diag >= 0.0)
    bare = build_hamiltonian("planar_2var", grid, 0.01, 1.0)
    pert = build_hamiltonian("planar_2var", grid, 0.01, 1.0, magnetic=mspec)
    w0 = dense_oracle(bare, 40).eigenvalues
    w1 = dense_oracle(pert, 40).eigenvalues
    assert np.all(w1 >= w0 - 1e-12)
    assert w1[0] > w0[0]  # the shift is actually visible


def test_parity_commutation_exact():
    sys_cases = [
        ("planar_2var", [("R", -5, 5, 12), ("x", -5, 5, 12)]),
        ("cylinder_2var", [("R", -5, 5, 12), ("x", -5, 5, 12)]),
        ("cylinder_3var", [("R", -4, 4, 8), ("x", -4, 4, 8), ("y", -4, 4, 8)]),
    ]
    for form, axes in sys_cases:
        grid = make_box_grid(axes)
        op = build_hamiltonian(form, grid, 0.01, 1.0)
        h = op.to_dense()
        # reflection permutation along the R axis
        idx = np.arange(grid.total_points).reshape(grid.shape)
        idx = np.flip(idx, axis=0).reshape(-1)
        hp = h[idx][:, idx]
        assert np.max(np.abs(hp - h)) <= 1e-12


def test_cylinder_radial_term_matches_disk_modes():
    # lowest radial eigenvalues of the doubled interval approximate the
    # squared Bessel J0 zeros of the Dirichlet disk
    ax = Axis("x", -1.0, 1.0, 160)
    k = radial_kinetic_1d(ax)
    w = np.linalg.eigvalsh(k)
    exact = jn_zeros(0, 2) ** 2
    # doubled interval: modes come in near-degenerate pairs
    assert w[0] == pytest.approx(exact[0], rel=1.5e-2)
    assert w[1] == pytest.approx(exact[0], rel=1.5e-2)
    assert w[2] == pytest.approx(exact[1], rel=1.5e-2)
    assert np.all(w > -1e-10)  # positive semidefinite: no collapse


def test_cylinder_radial_second_order_convergence():
    exact = jn_zeros(0, 1)[0] ** 2
    errs = []
    for n in (40, 80, 160):
        w = np.linalg.eigvalsh(radial_kinetic_1d(Axis("x", -1.0, 1.0, n)))
        errs.append(abs(w[0] - exact))
    order = np.polyfit(np.log([1 / 40, 1 / 80, 1 / 160]), np.log(errs), 1)[0]
    assert abs(order - 2.0) <= 0.4


def test_cylinder_operator_bounded_below():
    grid = make_box_grid([("R", -15, 15, 40), ("x", -15, 15, 40)])
    op = build_hamiltonian("cylinder_2var", grid, 0.00027, 1.0)
    w = dense_oracle(op, 1).eigenvalues[0]
    assert w > -3.0  # collapse would dive far below the physical scale


def test_prolate_weight_positive():
    grid = make_box_grid([("xi", 1.0, 10.0, 12), ("eta", -1.0, 1.0, 12)])
    a_op, w_op = build_prolate_fixed_r(grid, r=2.0, z=1.0)
    wd = w_op.diagonal()
    assert np.all(wd > 0.0)
    xi_m, eta_m = grid.meshes()
    assert np.allclose(wd, (xi_m**2 - eta_m**2).reshape(-1))


def test_prolate_small_grid_against_dense_oracle():
    grid = make_box_grid([("xi", 1.0, 10.0, 12), ("eta", -1.0, 1.0, 12)])
    a_op, w_op = build_prolate_fixed_r(grid, r=2.0, z=1.0)
    from qcollide.eigensolve import solve_lowest_generalized

    sol = solve_lowest_generalized(a_op, w_op, 6, tol=1e-9)
    ref = dense_oracle_generalized(a_op, w_op, 6)
    assert np.allclose(sol.eigenvalues, ref.eigenvalues, rtol=1e-8)


def test_prolate_lowest_lambda_negative_at_moderate_r():
    grid = make_box_grid([("xi", 1.0, 12.0, 40), ("eta", -1.0, 1.0, 20)])
    a_op, w_op = build_prolate_fixed_r(grid, r=4.0, z=1.0)
    lam0 = dense_oracle_generalized(a_op, w_op, 1, cap=2000).eigenvalues[0]
    assert lam0 < 0.0


def test_prolate_rejects_bad_grids():
    with pytest.raises(OperatorError):
        grid = make_box_grid([("xi", 0.5, 10.0, 8), ("eta", -1.0, 1.0, 8)])
        build_prolate_fixed_r(grid, r=1.0, z=1.0)
    grid = make_box_grid([("xi", 1.0, 10.0, 8), ("eta", -1.0, 1.0, 8)])
    with pytest.raises(OperatorError):
        build_prolate_fixed_r(grid, r=-1.0, z=1.0)
    with pytest.raises(OperatorError):
        build_prolate_fixed_r(grid, r=1.0, z=1.0, alpha=1)


def test_form_axis_mismatch_rejected():
    grid = make_box_grid([("R", -4, 4, 8), ("y", -4, 4, 8)])
    with pytest.raises(OperatorError):
        build_hamiltonian("planar_2var", grid, 0.01, 1.0)


def test_bad_mu_rejected():
    grid = make_box_grid([("R", -4, 4, 8), ("x", -4, 4, 8)])
    with pytest.raises(OperatorError):
        build_hamiltonian("planar_2var", grid, 0.0, 1.0)
    with pytest.raises(OperatorError):
        build_hamiltonian("planar_2var", grid, 1.5, 1.0)


def test_mu_one_warns():
    grid = make_box_grid([("R", -4, 4, 8), ("x", -4, 4, 8)])
    with pytest.warns(UserWarning):
        build_hamiltonian("planar_2var", grid, 1.0, 1.0)


def test_radial_axis_with_zero_point_rejected():
    ax = Axis("x", -1.0, 1.0, 5, "node_centered")  # includes x = 0
    with pytest.raises((OperatorError, SingularPotentialError)):
        radial_kinetic_1d(ax)


def test_nonfinite_potential_rejected():
    grid = make_box_grid([("R", -4, 4, 8), ("x", -4, 4, 8)])
    with pytest.raises(SingularPotentialError):
        build_hamiltonian(
            "planar_2var", grid, 0.01, 1.0,
            potential_override=lambda r, x: np.where(r > 0, np.inf, 0.0),
        )


def test_triplet_dump_load_round_trip(tmp_path):
    grid = make_box_grid([("R", -4, 4, 8), ("x", -4, 4, 8)])
    op = build_hamiltonian("planar_2var", grid, 0.05, 1.0)
    for binary in (False, True):
        path = tmp_path / ("op.bin" if binary else "op.txt")
        dump_triplets(op, path, binary=binary)
        back = load_triplets(path)
        assert back.dimension == op.dimension
        assert np.array_equal(back.rows, op.rows)
        assert np.array_equal(back.cols, op.cols)
        if binary:
            assert np.array_equal(back.vals, op.vals)
        else:
            assert np.allclose(back.vals, op.vals, rtol=0, atol=0)


def test_sparse_kron_matches_dense_assembly():
    # cross-check the sparse assembly against an independent dense kron
    grid = make_box_grid([("R", -3, 3, 6), ("x", -3, 3, 8)])
    op = build_hamiltonian("planar_2var", grid, 0.2, 1.0)
    kr = second_derivative_1d(6, grid.axes[0].spacing) * 8 * 0.2
    kx = second_derivative_1d(8, grid.axes[1].spacing)
    from qcollide.potentials import PotentialSpec, eval_potential

    v = eval_potential(PotentialSpec(1.0, "planar_2var"), grid.meshes())
    dense = (np.kron(kr, np.eye(8)) + np.kron(np.eye(6), kx)
             + np.diag(np.asarray(v).reshape(-1)))
    assert np.allclose(op.to_dense(), dense, atol=1e-14)
