import numpy as np
import pytest

from leakyfem import oracles
from leakyfem.errors import DomainError


def test_point_delta_closed_form():
    # elementary matching gives the single bound state -alpha^2/4
    for alpha, exact in ((2.0, -1.0), (4.0, -4.0), (1.0, -0.25)):
        r = oracles.point_delta_1d(alpha)
        assert r.eigenvalues.shape == (1,)
        assert r.eigenvalues[0] == pytest.approx(exact, abs=1e-8)


def test_point_delta_small_alpha_limit():
    vals = [oracles.point_delta_1d(a).eigenvalues[0]
            for a in (0.5, 0.25, 0.125)]
    assert all(v < 0 for v in vals)
    assert vals[0] < vals[1] < vals[2]  # tends to zero from below


def test_point_delta_nonpositive_alpha_empty():
    assert oracles.point_delta_1d(0.0).eigenvalues.size == 0
    assert oracles.point_delta_1d(-2.0).eigenvalues.size == 0


def test_point_deltaprime_closed_form():
    for beta, exact in ((2.0, -1.0), (4.0, -0.25), (1.0, -4.0)):
        r = oracles.point_deltaprime_1d(beta)
        assert r.eigenvalues.shape == (1,)
        assert r.eigenvalues[0] == pytest.approx(exact, abs=1e-8)


def test_point_deltaprime_nonpositive_beta_empty():
    assert oracles.point_deltaprime_1d(0.0).eigenvalues.size == 0
    assert oracles.point_deltaprime_1d(-1.0).eigenvalues.size == 0


def test_borderline_degeneracy_1d():
    # beta = 4/alpha: the two 1d point models share the eigenvalue exactly
    alpha = 2.0
    d = oracles.point_delta_1d(alpha).eigenvalues[0]
    dp = oracles.point_deltaprime_1d(4.0 / alpha).eigenvalues[0]
    assert d == pytest.approx(-1.0, abs=1e-8)
    assert dp == pytest.approx(-1.0, abs=1e-8)
    assert d == pytest.approx(dp, abs=2e-8)


def test_resolution_convergence():
    # halving the base grid moves the reported values by < 1e-7
    for fn, s in ((oracles.point_delta_1d, 2.0),
                  (oracles.point_deltaprime_1d, 2.0)):
        base = fn(s)
        finer = fn(s, step=0.5 * base.resolution["step"])
        assert abs(base.eigenvalues[0] - finer.eigenvalues[0]) < 1e-7


def test_circle_delta_modes():
    r = oracles.circle_delta_radial(1.0, 5.0, m_max=3)
    lens = [p.size for p in r.per_mode]
    assert lens[0] >= 1
    assert all(lens[i] >= lens[i + 1] for i in range(len(lens) - 1))
    # sanity band relative to the straight-line limit
    assert r.eigenvalues[0] > -0.25 * 25.0 - 0.5
    assert np.all(r.eigenvalues < 0)


def test_circle_delta_straight_line_limit():
    vals = [oracles.circle_delta_radial(R, 2.0, m_max=0).eigenvalues[0]
            for R in (10.0, 20.0, 40.0)]
    # monotone approach to -alpha^2/4 = -1 from below
    assert vals[0] < vals[1] < vals[2] < -1.0
    assert abs(vals[-1] + 1.0) < 5e-4


def test_circle_radial_resolution_convergence():
    base = oracles.circle_delta_radial(1.0, 5.0, m_max=0)
    finer = oracles.circle_delta_radial(1.0, 5.0, m_max=0,
                                        step=0.5 * base.resolution["step"],
                                        r_out=base.resolution["r_out"])
    assert abs(base.eigenvalues[0] - finer.eigenvalues[0]) < 1e-7


def test_circle_deltaprime_pairing():
    alpha = 5.0
    rd = oracles.circle_delta_radial(1.0, alpha, m_max=2)
    rp = oracles.circle_deltaprime_radial(1.0, 4.0 / alpha, m_max=2)
    for pd, pp in zip(rd.per_mode, rp.per_mode):
        n = min(pd.size, pp.size)
        assert np.all(pp[:n] <= pd[:n] + 1e-6)
    with pytest.raises(DomainError):
        oracles.circle_deltaprime_radial(1.0, -1.0, m_max=1)


def test_circle_rejects_bad_parameters():
    with pytest.raises(DomainError):
        oracles.circle_delta_radial(-1.0, 5.0)
    with pytest.raises(DomainError):
        oracles.circle_delta_radial(1.0, 5.0, m_max=-2)
