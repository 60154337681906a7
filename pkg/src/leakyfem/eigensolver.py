"""Sparse symmetric generalized eigensolver and inertia counting.

smallest_eigenpairs() runs shift-invert Lanczos with full
reorthogonalization in the M-inner product on (A - sigma M)^-1 M, with a
fixed-seed start vector for reproducibility.  Clustered or multiple
eigenvalues, which a single-vector Krylov space cannot see, are recovered
by deflated restarts and certified against factorization inertia.

inertia_count() realizes the eigenvalue counting function below a level:
the number of negative pivots of an LDL^T-type factorization of A - mu M
equals the number of pencil eigenvalues below mu (Sylvester's law).  The
factorization is SuperLU in symmetric mode with diagonal pivoting only,
so its U-diagonal carries the pivots; any off-diagonal pivoting or a tiny
pivot aborts the count instead of risking a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import splu

from .errors import SolverError

DEFAULT_SEED = 1729
DEFAULT_TOL = 1e-9
PIVOT_FLOOR = 1e-14


@dataclass(frozen=True)
class EigenResult:
    """Ascending eigenvalues with M-orthonormal eigenvectors and residuals."""

    values: np.ndarray     # (k,) ascending
    vectors: np.ndarray    # (n, k), vectors^T M vectors = identity
    residuals: np.ndarray  # (k,) 2-norm of A x - lambda M x over ||x||_M
    shift_used: float

    @property
    def k(self):
        return self.values.shape[0]


def _sym_factor(S):
    """SuperLU with symmetric mode and static diagonal pivoting.

    Raises SolverError if the factorization had to pivot off the diagonal
    or met an exactly singular pivot; in that case the level is too close
    to the spectrum for an inertia statement.
    """
    try:
        lu = splu(S.tocsc(), permc_spec="MMD_AT_PLUS_A",
                  diag_pivot_thresh=0.0, options=dict(SymmetricMode=True))
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise SolverError("factorization pivoted off the diagonal; "
                          "level too close to the spectrum")
    return lu


def _pivots(S):
    lu = _sym_factor(S)
    d = lu.U.diagonal()
    if d.size and np.min(np.abs(d)) < PIVOT_FLOOR:
        raise SolverError("level too close to spectrum: pivot below 1e-14")
    return d, lu


def inertia_count(A, M, mu: float) -> int:
    """Number of pencil eigenvalues of (A, M) strictly below mu."""
    d, _ = _pivots((A - mu * M).tocsc())
    return int((d < 0).sum())


def _inf_norm(A):
    return float(abs(A).sum(axis=1).max()) if A.nnz else 0.0


def lower_shift(A, M) -> float:
    """A shift sigma with A - sigma M positive definite.

    Starts from the heuristic sigma0 = -1 - ||A||_inf / min(diag M) and
    doubles it until an attempted factorization certifies definiteness.
    """
    dm = M.diagonal()
    if np.any(dm <= 0):
        raise SolverError("mass matrix has non-positive diagonal entries")
    sigma = -1.0 - _inf_norm(A) / float(dm.min())
    for _ in range(40):
        try:
            d, _ = _pivots((A - sigma * M).tocsc())
            if not np.any(d < 0):
                return sigma
        except SolverError:
            pass
        sigma *= 2.0
    raise SolverError("no positive definite shift found after 40 doublings")


def _tighten_shift(A, M, sigma_safe):
    """Walk the certified shift toward the spectrum by halving; keeps the
    largest level with zero eigenvalues below it."""
    sigma = sigma_safe
    probe = sigma_safe
    for _ in range(60):
        probe = 0.5 * probe
        if abs(probe) < 1e-6:
            break
        try:
            if inertia_count(A, M, probe) == 0:
                sigma = probe
            else:
                break
        except SolverError:
            break
    return sigma


def _msolve_factor(A, M, sigma):
    lu = _sym_factor((A - sigma * M).tocsc())
    d = lu.U.diagonal()
    if np.any(d < 0):
        raise SolverError(f"shift {sigma} is not below the spectrum")
    return lu


def _lanczos(lu, A, M, sigma, k, tol, rng, deflate, budget):
    """One deflated shift-invert Lanczos sweep.

    Returns (values, vectors, residuals, exhausted): converged pairs of the
    pencil nearest above sigma, M-orthogonal to the deflation block.
    """
    n = A.shape[0]
    mcap = min(n - deflate.shape[1], budget)
    if mcap <= 0:
        return (np.empty(0), np.empty((n, 0)), np.empty(0), False)
    k = min(k, mcap)
    V = np.empty((n, min(mcap, max(2 * k + 24, 48)) + 1))

    def mdot(x, y):
        return float(x @ (M @ y))

    def orth(w):
        for _ in range(2):
            if deflate.shape[1]:
                w = w - deflate @ (deflate.T @ (M @ w))
            if j >= 0:
                w = w - V[:, :j + 1] @ (V[:, :j + 1].T @ (M @ w))
        return w

    j = -1
    v = rng.standard_normal(n)
    v = orth(v)
    nrm = np.sqrt(mdot(v, v))
    if nrm < 1e-300:
        return (np.empty(0), np.empty((n, 0)), np.empty(0), False)
    V[:, 0] = v / nrm

    alphas, betas = [], []
    explicit_every = 4
    for j in range(mcap):
        if j + 1 >= V.shape[1]:
            grow = np.empty((n, min(mcap, V.shape[1] * 2 - 1) + 1))
            grow[:, :V.shape[1]] = V
            V = grow
        w = lu.solve(M @ V[:, j])
        if j > 0:
            w -= betas[j - 1] * V[:, j - 1]
        a = mdot(w, V[:, j])
        w -= a * V[:, j]
        alphas.append(a)
        w = orth(w)
        b = np.sqrt(mdot(w, w))
        scale = max(abs(a), 1.0) * 1e-13
        if b <= scale:
            # invariant subspace found; restart in a fresh direction
            w = orth(rng.standard_normal(n))
            b = np.sqrt(mdot(w, w))
            if b <= 1e-300:
                betas.append(0.0)
                break
            betas.append(0.0)
            V[:, j + 1] = w / b
        else:
            betas.append(b)
            V[:, j + 1] = w / b

        m = j + 1
        if m < k:
            continue
        theta, Y = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[:-1]))
        idx = np.argsort(theta)[::-1][:k]
        if np.any(theta[idx] <= 0):
            continue  # spurious negative Ritz values of the inverted operator
        lams = sigma + 1.0 / theta[idx]
        bound = abs(betas[-1] * Y[-1, idx]) / theta[idx] ** 2
        near = bound <= 0.5 * tol * np.maximum(1.0, np.abs(lams))
        if not (np.all(near) or (m % explicit_every == 0 and np.any(near))
                or m == mcap):
            continue
        X = V[:, :m] @ Y[:, idx]
        res = _residuals(A, M, X, lams)
        ok = res <= tol * np.maximum(1.0, np.abs(lams))
        if np.all(ok) or m == mcap:
            order = np.argsort(lams)
            exhausted = not np.all(ok)
            return lams[order], X[:, order], res[order], exhausted
    # ran out of space without convergence
    theta, Y = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas[:len(alphas) - 1]))
    idx = np.argsort(theta)[::-1][:k]
    pos = theta[idx] > 0
    idx = idx[pos]
    lams = sigma + 1.0 / theta[idx]
    X = V[:, :len(alphas)] @ Y[:, idx]
    res = _residuals(A, M, X, lams)
    order = np.argsort(lams)
    return lams[order], X[:, order], res[order], True


def _residuals(A, M, X, lams):
    R = A @ X - (M @ X) * lams[None, :]
    mnorm = np.sqrt(np.einsum("ij,ij->j", X, M @ X))
    return np.linalg.norm(R, axis=0) / mnorm


def _mortho_normalize(M, X):
    """Gram-Schmidt in the M-inner product, in place column order."""
    Q = X.copy()
    for i in range(Q.shape[1]):
        for _ in range(2):
            if i:
                Q[:, i] -= Q[:, :i] @ (Q[:, :i].T @ (M @ Q[:, i]))
        Q[:, i] /= np.sqrt(Q[:, i] @ (M @ Q[:, i]))
    return Q


def smallest_eigenpairs(A, M, k: int, tol: float = DEFAULT_TOL,
                        shift: float | None = None, seed: int = DEFAULT_SEED,
                        verify_count: bool = True) -> EigenResult:
    """k smallest eigenpairs of A x = lambda M x.

    Parameters
    ----------
    A, M : sparse symmetric matrices, M positive definite.
    k : number of eigenpairs (clamped to the pencil size).
    tol : residual tolerance for ||A x - lambda M x||_2 / ||x||_M.
    shift : optional shift-invert pole below the spectrum; when omitted a
        certified one is found and tightened automatically.
    seed : start-vector seed (results are deterministic given the seed).
    verify_count : cross-check the computed list against factorization
        inertia at cluster midpoints, restarting to pick up any eigenvalue
        a single Krylov sequence missed (multiplicities).

    Raises SolverError (carrying the best partial result) on
    non-convergence within the iteration budget.
    """
    if k < 1:
        raise SolverError("need k >= 1")
    if tol <= 0:
        raise SolverError("need tol > 0")
    n = A.shape[0]
    k = min(k, n)
    A = A.tocsr()
    M = M.tocsr()
    if shift is None:
        sigma = _tighten_shift(A, M, lower_shift(A, M))
    else:
        sigma = float(shift)
    lu = _msolve_factor(A, M, sigma)
    rng = np.random.default_rng(seed)
    budget = 10 * k + 200

    vals = np.empty(0)
    X = np.empty((n, 0))
    exhausted = False
    for attempt in range(4):
        want = k - vals.shape[0]
        if want > 0:
            lv, lX, lres, exhausted = _lanczos(lu, A, M, sigma, want, tol,
                                               rng, X, budget)
            if lv.size:
                vals = np.concatenate([vals, lv])
                X = np.hstack([X, lX])
                order = np.argsort(vals)
                vals = vals[order]
                X = X[:, order]
        if vals.shape[0] < k:
            if exhausted or vals.shape[0] == n:
                break
            continue
        if not verify_count:
            break
        missing = _count_mismatch(A, M, vals[:k])
        if missing == 0:
            break
        # keep the certified head of the list, deflate it, and search the
        # complement for the eigenvalues the Krylov sequence missed
        vals = vals[:missing]
        X = X[:, :missing]

    if vals.shape[0] < k:
        partial = _finalize(A, M, vals, X, sigma)
        raise SolverError("eigensolver did not converge within its budget",
                          partial=partial)
    vals = vals[:k]
    X = X[:, :k]
    if verify_count and _count_mismatch(A, M, vals) != 0:
        partial = _finalize(A, M, vals, X, sigma)
        raise SolverError("inertia check still fails after restarts",
                          partial=partial)
    return _finalize(A, M, vals, X, sigma)


def _finalize(A, M, vals, X, sigma):
    if vals.size:
        X = _mortho_normalize(M, X)
        res = _residuals(A, M, X, vals)
    else:
        res = np.empty(0)
    return EigenResult(values=vals.copy(), vectors=X, residuals=res,
                       shift_used=sigma)


def _count_mismatch(A, M, vals, cluster_tol=1e-8):
    """0 if inertia agrees with the list at every cluster midpoint, else the
    index (1-based) of the first midpoint where eigenvalues are missing."""
    scale = max(1.0, float(np.max(np.abs(vals))))
    for i in range(len(vals) - 1):
        if vals[i + 1] - vals[i] <= cluster_tol * scale:
            continue
        mu = 0.5 * (vals[i] + vals[i + 1])
        try:
            got = inertia_count(A, M, mu)
        except SolverError:
            return i + 1
        if got != i + 1:
            return i + 1
    return 0
