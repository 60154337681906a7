import math

import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp

from leakyfem import eigensolver as es
from leakyfem import femforms, geometry as geo, meshing
from leakyfem.errors import SolverError


def _identity(n):
    return sp.identity(n, format="csr")


def test_diag_smallest():
    A = sp.diags([1.0, 2.0, 3.0, 4.0]).tocsr()
    r = es.smallest_eigenpairs(A, _identity(4), 2, tol=1e-12)
    assert np.allclose(r.values, [1.0, 2.0], atol=1e-12)
    assert np.all(r.residuals <= 1e-12)


def test_lower_shift_diag():
    A = sp.diags([1.0, 2.0, 3.0]).tocsr()
    s = es.lower_shift(A, _identity(3))
    assert s < 1.0
    # certified: A - s I factors positive definite
    assert es.inertia_count(A, _identity(3), s) == 0


def test_lower_shift_negative_definite():
    A = (-_identity(3)).tocsr()
    s = es.lower_shift(A, _identity(3))
    assert s < -1.0


def test_inertia_diag():
    A = sp.diags([-3.0, -2.0, -0.5]).tocsr()
    M = _identity(3)
    assert es.inertia_count(A, M, -1.0) == 2
    assert es.inertia_count(A, M, -10.0) == 0
    assert es.inertia_count(A, M, 0.0) == 3


def test_inertia_level_too_close():
    A = sp.diags([-3.0, -2.0, -0.5]).tocsr()
    with pytest.raises(SolverError):
        es.inertia_count(A, _identity(3), -2.0)  # exactly an eigenvalue


def test_inertia_random_vs_dense():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(5, 40))
        B = rng.standard_normal((n, n))
        Ad = (B + B.T) / 2
        A = sp.csr_matrix(Ad)
        mu = float(rng.uniform(-3, 3))
        exact = int((sla.eigvalsh(Ad) < mu).sum())
        try:
            got = es.inertia_count(A, _identity(n), mu)
        except SolverError:
            continue
        assert got == exact


def test_generalized_against_dense():
    rng = np.random.default_rng(3)
    n = 80
    B = rng.standard_normal((n, n))
    Ad = (B + B.T) / 2
    C = rng.standard_normal((n, n))
    Md = C @ C.T + n * np.eye(n)
    exact = sla.eigh(Ad, Md, eigvals_only=True)
    r = es.smallest_eigenpairs(sp.csr_matrix(Ad), sp.csr_matrix(Md), 5, tol=1e-10)
    assert np.allclose(r.values, exact[:5], atol=1e-9)
    G = r.vectors.T @ (Md @ r.vectors)
    assert np.abs(G - np.eye(5)).max() <= 1e-8


def test_multiplicities_recovered():
    A = sp.diags([1.0, 1.0, 1.0, 2.0, 2.0, 5.0, 6.0, 7.0, 8.0, 9.0]).tocsr()
    r = es.smallest_eigenpairs(A, _identity(10), 5, tol=1e-12)
    assert np.allclose(r.values, [1, 1, 1, 2, 2], atol=1e-10)


def test_k_exceeding_bound_state_count():
    # more pairs requested than eigenvalues below any threshold: still valid
    A = sp.diags([-1.0, 0.5, 2.0, 7.0]).tocsr()
    r = es.smallest_eigenpairs(A, _identity(4), 4, tol=1e-12)
    assert np.allclose(r.values, [-1.0, 0.5, 2.0, 7.0], atol=1e-11)
    assert np.all(r.residuals <= 1e-12)


def test_point_interaction_chain():
    # second-difference chain with an attractive point coupling at the
    # center: ground state of -u'' - 2 delta_0 is -1
    h = 0.01
    half = 2000
    n = 2 * half + 1
    d = np.full(n, 2.0 / h ** 2)
    d[half] -= 2.0 / h
    off = np.full(n - 1, -1.0 / h ** 2)
    A = sp.diags([d, off, off], [0, -1, 1]).tocsr()
    r = es.smallest_eigenpairs(A, _identity(n), 1, tol=1e-10)
    assert r.values[0] == pytest.approx(-1.0, abs=1e-3)
    # post-hoc contract of lower_shift: the certified shift sits below
    s = es.lower_shift(A, _identity(n))
    assert s < r.values[0]


@pytest.fixture(scope="module")
def assembled_broken_line():
    g = geo.make_broken_line(math.pi / 4, 5.0)
    m = meshing.triangulate(g, 0.4)
    mat = geo.MaterialData.borderline(g, alpha=2.0)
    return femforms.assemble(m, mat)


def test_rayleigh_quotient_consistency(assembled_broken_line):
    F = assembled_broken_line
    A, M = F.matrices(femforms.DELTA)
    tol = 1e-9
    r = es.smallest_eigenpairs(A, M, 3, tol=tol)
    for lam, x in zip(r.values, r.vectors.T):
        rq = (x @ (A @ x)) / (x @ (M @ x))
        assert abs(rq - lam) <= 10 * tol * max(1.0, abs(lam))


def test_shift_invariance(assembled_broken_line):
    F = assembled_broken_line
    A, M = F.matrices(femforms.DELTA_PRIME)
    r1 = es.smallest_eigenpairs(A, M, 3, tol=1e-10, shift=-8.0)
    r2 = es.smallest_eigenpairs(A, M, 3, tol=1e-10, shift=-3.0)
    assert np.abs(r1.values - r2.values).max() <= 1e-9
    assert r1.shift_used != r2.shift_used


def test_inertia_agrees_with_computed_spectrum(assembled_broken_line):
    F = assembled_broken_line
    A, M = F.matrices(femforms.DELTA)
    r = es.smallest_eigenpairs(A, M, 4, tol=1e-10)
    for i in range(3):
        if r.values[i + 1] - r.values[i] < 1e-7:
            continue
        mu = 0.5 * (r.values[i] + r.values[i + 1])
        assert es.inertia_count(A, M, mu) == i + 1


def test_refinement_monotonicity():
    g = geo.make_broken_line(math.pi / 4, 5.0)
    m0 = meshing.triangulate(g, 0.8)
    m1 = meshing.refine_uniform(m0)
    mat = geo.MaterialData.borderline(g, alpha=2.0)
    vals = []
    for m in (m0, m1):
        F = femforms.assemble(m, mat)
        r = es.smallest_eigenpairs(*F.matrices(femforms.DELTA), k=2, tol=1e-10)
        vals.append(r.values)
    # Rayleigh-Ritz on nested spaces: eigenvalues do not increase
    assert vals[1][0] <= vals[0][0] + 1e-9
    assert vals[1][1] <= vals[0][1] + 1e-9


def test_bad_inputs():
    A = sp.diags([1.0, 2.0]).tocsr()
    with pytest.raises(SolverError):
        es.smallest_eigenpairs(A, _identity(2), 0)
    with pytest.raises(SolverError):
        es.smallest_eigenpairs(A, _identity(2), 1, tol=0.0)
    with pytest.raises(SolverError):
        es.smallest_eigenpairs(A, _identity(2), 1, shift=1.5)  # not below
