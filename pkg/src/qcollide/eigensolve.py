"""Lowest-eigenpair solvers for symmetric (and generalized) sparse operators.

solve_lowest is a Lanczos iteration with full reorthogonalization and a
deterministic seeded start; the basis grows (with restarts from scratch)
until the requested pairs meet the residual tolerance. Exhausted invariant
subspaces trigger a deterministic breakdown restart, so at basis size N the
complete spectrum (with multiplicities) is recovered. dense_oracle is the
independent LAPACK route used to verify it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .operators import SparseOperator, apply


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted; carries the best-effort EigenSolution."""

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class WeightError(ValueError):
    """Generalized solve with a non-positive weight matrix."""


@dataclass
class EigenSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (dimension, k), columns orthonormal
    residuals: np.ndarray
    k: int
    solver_stats: dict = field(default_factory=dict)


def _as_linear(op):
    if isinstance(op, SparseOperator):
        mat = op.to_csr()
        return mat, op.dimension
    if sp.issparse(op):
        return op.tocsr(), op.shape[0]
    arr = np.asarray(op, dtype=float)
    return arr, arr.shape[0]


def _tie_break(values: np.ndarray, vectors: np.ndarray, rtol: float = 1e-12):
    """Order degenerate clusters by the index of the largest-magnitude
    component, making reported order basis-independent in exact ties."""
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    scale = max(abs(values[0]), abs(values[-1]), 1.0)
    start = 0
    for stop in range(1, len(values) + 1):
        if stop == len(values) or values[stop] - values[start] > rtol * scale:
            if stop - start > 1:
                anchor = np.argmax(np.abs(vectors[:, start:stop]), axis=0)
                sub = np.argsort(anchor, kind="stable")
                vectors[:, start:stop] = vectors[:, start:stop][:, sub]
                values[start:stop] = values[start:stop][sub]
            start = stop
    return values, vectors


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    """Largest-magnitude component of each column made positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def dense_oracle(op, k: int, cap: int = 5000) -> EigenSolution:
    """Full dense symmetric eigendecomposition, truncated to k pairs."""
    mat, n = _as_linear(op)
    if n > cap:
        raise ValueError(f"dense oracle capped at dimension {cap}, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat, dtype=float)
    t0 = time.perf_counter()
    vals, vecs = np.linalg.eigh(dense)
    vals, vecs = vals[:k], vecs[:, :k]
    vals, vecs = _tie_break(vals, vecs)
    vecs = _fix_sign(vecs)
    res = np.linalg.norm(dense @ vecs - vecs * vals, axis=0)
    return EigenSolution(
        eigenvalues=vals,
        eigenvectors=vecs,
        residuals=res,
        k=k,
        solver_stats={"method": "dense", "wall_time_s": time.perf_counter() - t0},
    )


def _lanczos_basis(matvec, n: int, m: int, rng: np.random.Generator):
    """Full-reorthogonalized Lanczos basis of size m with breakdown restarts."""
    q = np.empty((m, n))
    alpha = np.empty(m)
    beta = np.zeros(m)  # beta[j] couples q[j] and q[j+1]
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    q[0] = v
    restarts = 0
    j = 0
    while j < m:
        w = matvec(q[j])
        alpha[j] = q[j] @ w
        w -= alpha[j] * q[j]
        if j > 0:
            w -= beta[j - 1] * q[j - 1]
        # full reorthogonalization, twice for safety
        basis = q[: j + 1]
        w -= basis.T @ (basis @ w)
        w -= basis.T @ (basis @ w)
        if j + 1 == m:
            break
        nrm = np.linalg.norm(w)
        if nrm < 1e-12:
            # invariant subspace exhausted: deterministic fresh direction
            w = rng.standard_normal(n)
            w -= basis.T @ (basis @ w)
            nrm = np.linalg.norm(w)
            if nrm < 1e-12:
                m = j + 1
                break
            beta[j] = 0.0
            restarts += 1
        else:
            beta[j] = nrm
        q[j + 1] = w / nrm
        j += 1
    return q[:m], alpha[:m], beta[: max(m - 1, 0)], restarts


def solve_lowest(
    op,
    k: int,
    tol: float = 1e-8,
    seed: int = 0,
    max_basis: int | None = None,
) -> EigenSolution:
    """k lowest eigenpairs of a symmetric operator with residuals <= tol.

    Deterministic for fixed (op, k, tol, seed). Raises ConvergenceError with
    the best-effort solution if the basis budget is exhausted before the
    residual contract holds.
    """
    mat, n = _as_linear(op)
    if not 1 <= k < max(n, 2):
        raise ValueError(f"need 1 <= k < dimension, got k={k}, n={n}")
    matvec = (lambda v: mat @ v) if sp.issparse(mat) else (lambda v: mat.dot(v))
    budget = n if max_basis is None else min(max_basis, n)
    m = min(budget, max(3 * k + 40, 120))
    t0 = time.perf_counter()
    iters_total = 0
    restarts_total = 0
    while True:
        rng = np.random.default_rng(seed)
        q, alpha, beta, restarts = _lanczos_basis(matvec, n, m, rng)
        iters_total += len(alpha)
        restarts_total += restarts
        tvals, tvecs = sla.eigh_tridiagonal(alpha, beta)
        vals = tvals[:k]
        vecs = q.T @ tvecs[:, :k]
        # re-verify the residual contract by independent matvec
        res = np.array([np.linalg.norm(matvec(vecs[:, i]) - vals[i] * vecs[:, i])
                        for i in range(k)])
        if np.all(res <= tol) or m >= budget:
            break
        m = min(budget, int(m * 1.6) + 20)
    vals, vecs = _tie_break(vals, vecs)
    vecs = _fix_sign(vecs)
    res = np.array([np.linalg.norm(matvec(vecs[:, i]) - vals[i] * vecs[:, i])
                    for i in range(k)])
    stats = {
        "method": "lanczos",
        "seed": seed,
        "iterations": iters_total,
        "restarts": restarts_total,
        "basis_size": m,
        "wall_time_s": time.perf_counter() - t0,
    }
    sol = EigenSolution(eigenvalues=vals, eigenvectors=vecs, residuals=res, k=k,
                        solver_stats=stats)
    if not np.all(res <= tol):
        raise ConvergenceError(
            f"residuals up to {res.max():.2e} exceed tol {tol:.2e} "
            f"at basis budget {budget}", sol)
    return sol


def solve_lowest_generalized(
    a_op, w_op, k: int, tol: float = 1e-8, seed: int = 0,
    max_basis: int | None = None,
) -> EigenSolution:
    """k lowest of A v = lambda W v for diagonal positive W.

    Reduced to the standard problem with B = W^-1/2 A W^-1/2; returned
    eigenvectors are W-orthonormal and residuals are |Av - lambda W v| in
    the W^-1 norm (= standard residuals of B).
    """
    amat, n = _as_linear(a_op)
    wmat, nw = _as_linear(w_op)
    if n != nw:
        raise WeightError("A and W dimensions differ")
    wdiag = wmat.diagonal() if sp.issparse(wmat) else np.diag(wmat)
    off = (wmat - sp.diags(wdiag)) if sp.issparse(wmat) else (wmat - np.diag(wdiag))
    off_norm = abs(off).max() if not sp.issparse(off) else (
        0.0 if off.nnz == 0 else np.abs(off.data).max())
    if off_norm != 0.0:
        raise WeightError("W must be diagonal")
    if np.any(wdiag <= 0.0):
        raise WeightError("W must have strictly positive diagonal entries")
    s = 1.0 / np.sqrt(wdiag)
    if sp.issparse(amat):
        b = sp.diags(s) @ amat @ sp.diags(s)
    else:
        b = s[:, None] * amat * s[None, :]
        b = 0.5 * (b + b.T)  # scrub rounding asymmetry
    sol = solve_lowest(b, k, tol=tol, seed=seed, max_basis=max_basis)
    sol.eigenvectors = s[:, None] * sol.eigenvectors
    sol.solver_stats["method"] = "lanczos_generalized"
    return sol


def dense_oracle_generalized(a_op, w_op, k: int, cap: int = 5000) -> EigenSolution:
    """Dense generalized symmetric oracle (scipy.linalg.eigh with b)."""
    amat, n = _as_linear(a_op)
    if n > cap:
        raise ValueError(f"dense oracle capped at dimension {cap}, got {n}")
    wmat, _ = _as_linear(w_op)
    a = amat.toarray() if sp.issparse(amat) else np.asarray(amat, float)
    w = wmat.toarray() if sp.issparse(wmat) else np.asarray(wmat, float)
    vals, vecs = sla.eigh(a, w)
    vals, vecs = _tie_break(vals[:k], vecs[:, :k])
    vecs = _fix_sign(vecs)
    res = np.linalg.norm(a @ vecs - (w @ vecs) * vals, axis=0)
    return EigenSolution(eigenvalues=vals, eigenvectors=vecs, residuals=res, k=k,
                         solver_stats={"method": "dense_generalized"})


def orthonormality_defect(sol: EigenSolution, w_op=None) -> float:
    """max |V^T W V - I| (W = identity for the standard problem)."""
    v = sol.eigenvectors
    if w_op is None:
        g = v.T @ v
    else:
        wmat, _ = _as_linear(w_op)
        g = v.T @ (wmat @ v)
    return float(np.abs(g - np.eye(sol.k)).max())


def verify_residuals(op, sol: EigenSolution) -> np.ndarray:
    """Independent post-hoc residual check via apply()."""
    if isinstance(op, SparseOperator):
        return np.array([
            np.linalg.norm(apply(op, sol.eigenvectors[:, i])
                           - sol.eigenvalues[i] * sol.eigenvectors[:, i])
            for i in range(sol.k)
        ])
    mat, _ = _as_linear(op)
    return np.linalg.norm(mat @ sol.eigenvectors - sol.eigenvectors * sol.eigenvalues,
                          axis=0)
