import math

import numpy as np
import pytest

from leakyfem import femforms, geometry as geo, meshing, pipeline
from leakyfem import spectral_analysis as sa
from leakyfem.eigensolver import EigenResult, smallest_eigenpairs
from leakyfem.errors import ConsistencyError, DomainError, TheoremViolation


def _fake_result(values, shift=-10.0):
    v = np.asarray(values, dtype=float)
    return EigenResult(values=v, vectors=np.zeros((1, v.size)),
                       residuals=np.zeros(v.size), shift_used=shift)


def test_threshold_broken_line():
    g = geo.make_broken_line(math.pi / 4, 6.0)
    mat = geo.MaterialData.constant(g, alpha=2.0, beta=2.0)
    t = sa.essential_threshold(g, mat, sa.DELTA)
    assert t.value == -1.0  # -alpha^2/4 exactly
    t2 = sa.essential_threshold(g, mat, sa.DELTA_PRIME)
    assert t2.value == -1.0  # -4/beta^2 exactly
    assert not t2.conjectured


def test_threshold_circle_compact():
    g = geo.make_circle(1.0, (0.0, 0.0), 4.0, 32)
    mat = geo.MaterialData.constant(g, alpha=7.0, beta=0.1)
    assert sa.essential_threshold(g, mat, sa.DELTA).value == 0.0
    assert sa.essential_threshold(g, mat, sa.DELTA_PRIME).value == 0.0


def test_threshold_line_plus_circle():
    g = geo.make_line_plus_circle(3.0, 1.0, 12.0, 32)
    mat = geo.MaterialData.constant(g, alpha=2.0, beta=0.5)
    assert sa.essential_threshold(g, mat, sa.DELTA).value == -1.0
    assert sa.essential_threshold(g, mat, sa.DELTA_PRIME).value == -16.0


def test_threshold_cone_conjectured():
    g = geo.make_cone_meridian(math.pi / 4, 6.0)
    mat = geo.MaterialData.constant(g, alpha=2.0, beta=2.0)
    t = sa.essential_threshold(g, mat, sa.DELTA_PRIME)
    assert t.value == -1.0
    assert t.conjectured
    assert not sa.essential_threshold(g, mat, sa.DELTA).conjectured


def test_threshold_nonconstant_refused():
    g = geo.make_broken_line(math.pi / 4, 6.0)
    mat = geo.MaterialData(alpha=np.array([2.0, 3.0]), beta=np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        sa.essential_threshold(g, mat, sa.DELTA)
    # nonconstant on the compact component only is fine
    glc = geo.make_line_plus_circle(3.0, 1.0, 12.0, 32)
    alpha = np.full(33, 2.0)
    alpha[5] = 3.0  # a circle chord; the line keeps constant strength
    mlc = geo.MaterialData(alpha=alpha, beta=np.full(33, 1.0))
    assert sa.essential_threshold(glc, mlc, sa.DELTA).value == -1.0


def test_richardson_quadratic():
    limit, order, err = sa.richardson(1.16, 1.04, 1.01)
    assert order == pytest.approx(2.0, abs=1e-12)
    assert limit == pytest.approx(1.0, abs=1e-12)
    assert err == pytest.approx(0.01, abs=1e-12)


def test_richardson_constant_and_nonmonotone():
    limit, order, err = sa.richardson(2.0, 2.0, 2.0)
    assert limit == 2.0 and err == 0.0 and math.isnan(order)
    limit, order, err = sa.richardson(1.0, 0.9, 0.95)
    assert math.isnan(order)
    assert err == pytest.approx(0.05)
    assert limit == 0.95


def test_counting_trivial():
    res = _fake_result([-3.0, -2.0, -0.5])
    import scipy.sparse as sp
    A = sp.diags([-3.0, -2.0, -0.5]).tocsr()
    M = sp.identity(3, format="csr")
    thr = sa.ThresholdInfo(sa.DELTA, "circle", 0.0, "test")
    assert sa.counting(res, -1.0, A, M, thr) == 2
    assert sa.counting(res, -5.0, A, M, thr) == 0
    with pytest.raises(DomainError):
        sa.counting(res, 0.5, A, M, thr)  # not below the threshold


def test_counting_consistency_error():
    import scipy.sparse as sp
    res = _fake_result([-3.0, -0.5])  # pretends -2.0 does not exist
    A = sp.diags([-3.0, -2.0, -0.5]).tocsr()
    M = sp.identity(3, format="csr")
    thr = sa.ThresholdInfo(sa.DELTA, "circle", 0.0, "test")
    with pytest.raises(ConsistencyError):
        sa.counting(res, -1.0, A, M, thr)


def _thresholds(vd=-1.0, vp=-1.0):
    return (sa.ThresholdInfo(sa.DELTA, "broken_line", vd, "t"),
            sa.ThresholdInfo(sa.DELTA_PRIME, "broken_line", vp, "t"))


def test_verify_strict_and_cutoff():
    rd = _fake_result([-1.5, -1.2, -0.8])
    rp = _fake_result([-1.8, -1.4, -0.85])
    rep = sa.verify_theoremA(rd, rp, _thresholds(), errors=0.01)
    # only n with lambda_n(delta) < -1 are covered by the comparison
    assert [p.n for p in rep.pairs] == [1, 2]
    assert all(p.verdict == "strict" for p in rep.pairs)
    assert rep.all_strict


def test_verify_indistinguishable():
    rd = _fake_result([-1.5])
    rp = _fake_result([-1.5000001])
    rep = sa.verify_theoremA(rd, rp, _thresholds(), errors=1e-3)
    assert rep.pairs[0].verdict == "indistinguishable"
    # identical results twice: gaps are zero
    rep2 = sa.verify_theoremA(rd, rd, _thresholds(), errors=1e-3)
    assert rep2.pairs[0].gap == 0.0
    assert rep2.pairs[0].verdict == "indistinguishable"


def test_verify_violation_raises():
    rd = _fake_result([-1.5])
    rp = _fake_result([-1.4])  # delta-prime above delta: assembly-level bug
    with pytest.raises(TheoremViolation) as ei:
        sa.verify_theoremA(rd, rp, _thresholds(), errors=1e-3)
    assert ei.value.report.pairs[0].verdict == "violated"


def test_verify_clusterwise_grading():
    # nearly degenerate pair: strictness must hold against the cluster edges
    rd = _fake_result([-2.0, -1.5, -1.5 + 5e-9])
    rp = _fake_result([-2.5, -1.6, -1.6 + 5e-9])
    rep = sa.verify_theoremA(rd, rp, _thresholds(), errors=0.01)
    assert [p.verdict for p in rep.pairs] == ["strict"] * 3
    gap_cluster = -1.5 - (-1.6 + 5e-9)
    assert rep.pairs[1].verdict == "strict"
    assert gap_cluster > 0.01


@pytest.fixture(scope="module")
def solved_circle():
    g = geo.make_circle(1.0, (0.0, 0.0), 3.5, 48)
    mat = geo.MaterialData.constant(g, alpha=5.0, beta=0.7)
    meshes = pipeline.mesh_levels(g, 0.3, 1)
    forms = [femforms.assemble(m, mat) for m in meshes]
    rd = pipeline.cascade_solve(forms, sa.DELTA, 3)
    rp = pipeline.cascade_solve(forms, sa.DELTA_PRIME, 3)
    return g, mat, forms, rd, rp


def test_counting_table_circle(solved_circle):
    g, mat, forms, rd, rp = solved_circle
    td = sa.essential_threshold(g, mat, sa.DELTA)
    tp = sa.essential_threshold(g, mat, sa.DELTA_PRIME)
    rows = sa.counting_table(forms[-1], rd[-1], rp[-1], td, tp)
    assert rows, "expected at least one counting level"
    for r in rows:
        assert r.n_deltaprime >= r.n_delta


def test_discrete_comparison_holds(solved_circle):
    g, mat, forms, rd, rp = solved_circle
    for lev in range(len(rd)):
        n = min(rd[lev].values.size, rp[lev].values.size)
        assert np.all(rp[lev].values[:n] <= rd[lev].values[:n] + 1e-9)


def test_truncation_monotone_and_stabilizing():
    g = geo.make_broken_line(math.pi / 4, 9.0)
    mat = geo.MaterialData.borderline(g, alpha=2.0)
    ts = sa.truncation_study(g, mat, [4.5, 6.0, 9.0], h=0.5,
                             which=sa.DELTA, refinements=1, k=2)
    assert np.all(np.diff(ts.values, axis=0) <= 1e-9)  # nested spaces
    # the bound state below the threshold stabilizes geometrically
    d = ts.deltas[:, 0]
    assert d[1] < d[0]


def test_truncation_preconditions():
    g = geo.make_broken_line(math.pi / 4, 9.0)
    mat = geo.MaterialData.borderline(g, alpha=2.0)
    with pytest.raises(DomainError):
        sa.truncation_study(g, mat, [9.0], h=0.5, which=sa.DELTA)
    with pytest.raises(DomainError):
        sa.truncation_study(g, mat, [4.0, 6.0], h=0.5, which=sa.DELTA)


def test_convergence_study_orders():
    g = geo.make_circle(1.0, (0.0, 0.0), 3.5, 48)
    mat = geo.MaterialData.constant(g, alpha=5.0, beta=0.8)
    meshes = pipeline.mesh_levels(g, 0.4, 2)
    forms = [femforms.assemble(m, mat) for m in meshes]
    rd = pipeline.cascade_solve(forms, sa.DELTA, 1)
    conv = sa.convergence_study(rd)
    assert len(conv["order"]) == 1
    assert conv["error"][0] >= 0.0
    with pytest.raises(DomainError):
        sa.convergence_study(rd[:2])
