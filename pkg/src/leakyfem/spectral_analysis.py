"""Operator-level spectral quantities and their verification.

Turns raw eigenpairs into: essential-spectrum thresholds (table lookup
for the catalog geometries), eigenvalue counting functions cross-checked
against factorization inertia, the graded eigenvalue-comparison report,
Richardson extrapolation over nested mesh families, and box-truncation
studies that are monotone by construction.

The comparison verdicts are deliberately conservative: a pair is graded
"strict" only when the observed gap exceeds the combined numerical error
budget (Richardson estimate + truncation delta + solver tolerance);
eigenvalues closer than a clustering tolerance are compared cluster-wise
because their internal ordering carries no information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import femforms, pipeline
from .eigensolver import DEFAULT_SEED, DEFAULT_TOL, EigenResult, inertia_count
from .errors import ConsistencyError, DomainError, TheoremViolation
from .geometry import CIRCLE, CONE_MERIDIAN, InterfaceGeometry, MaterialData

DELTA = femforms.DELTA
DELTA_PRIME = femforms.DELTA_PRIME

CLUSTER_TOL = 1e-8
HARD_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdInfo:
    """Bottom of the essential spectrum for one operator and geometry."""

    operator: str
    geometry_kind: str
    value: float
    note: str
    conjectured: bool = False

    def as_dict(self):
        return {"operator": self.operator, "geometry": self.geometry_kind,
                "value": self.value, "note": self.note,
                "conjectured": self.conjectured}


def _constant_unbounded_strength(geometry, values, name):
    idx = [i for i, s in enumerate(geometry.segments) if s.unbounded]
    vals = np.asarray(values)[idx]
    if np.ptp(vals) > 1e-14 * max(1.0, abs(float(vals.mean()))):
        raise DomainError(
            f"threshold unknown: {name} is not constant on the unbounded "
            "part of the interface")
    return float(vals[0])


def essential_threshold(geometry: InterfaceGeometry, material: MaterialData,
                        kind: str) -> ThresholdInfo:
    """Bottom of the essential spectrum of the truncation-free operator.

    Compact interfaces give 0.  For interfaces with straight unbounded
    branches and constant strength there, the transverse point model
    gives -alpha^2/4 (delta) and -4/beta^2 (delta-prime); the delta-prime
    value on the cone is only expected, not proved, and is flagged so.
    """
    if kind not in (DELTA, DELTA_PRIME):
        raise DomainError(f"unknown operator kind {kind!r}")
    if geometry.kind == CIRCLE:
        return ThresholdInfo(kind, geometry.kind, 0.0,
                             "compact interface: essential spectrum [0, inf)")
    if kind == DELTA:
        a = _constant_unbounded_strength(geometry, material.alpha, "alpha")
        return ThresholdInfo(kind, geometry.kind, -0.25 * a * a,
                             "transverse point model bottom -alpha^2/4")
    b = _constant_unbounded_strength(geometry, material.beta, "beta")
    value = -4.0 / (b * b)
    if geometry.kind == CONE_MERIDIAN:
        return ThresholdInfo(kind, geometry.kind, value,
                             "conjectured bottom -4/beta^2 (cone)",
                             conjectured=True)
    return ThresholdInfo(kind, geometry.kind, value,
                         "transverse point model bottom -4/beta^2")


@dataclass(frozen=True)
class CountingRow:
    mu: float
    n_delta: int
    n_deltaprime: int

    def as_dict(self):
        return {"mu": self.mu, "N_delta": self.n_delta,
                "N_deltaprime": self.n_deltaprime}


def counting(eigs: EigenResult, mu: float, A, M, threshold) -> int:
    """Number of computed eigenvalues <= mu, cross-checked against the
    factorization inertia of A - mu M.

    mu must lie strictly below the essential-spectrum threshold, and the
    caller should place it between consecutive eigenvalues (the inertia
    count is only comparable when every pencil eigenvalue below mu was
    computed).
    """
    thr = threshold.value if isinstance(threshold, ThresholdInfo) else threshold
    if not mu < thr:
        raise DomainError(f"level {mu} is not below the threshold {thr}")
    got = int(np.sum(eigs.values <= mu))
    exact = inertia_count(A, M, mu)
    if got != exact:
        raise ConsistencyError(
            f"counting mismatch at mu={mu}: {got} computed vs "
            f"{exact} from inertia")
    return got


def counting_table(forms, res_delta: EigenResult, res_deltaprime: EigenResult,
                   thr_delta: ThresholdInfo, thr_deltaprime: ThresholdInfo):
    """Counting functions of both operators at midpoints between
    consecutive computed eigenvalues below both thresholds."""
    thr = min(thr_delta.value, thr_deltaprime.value)
    below = np.concatenate([res_delta.values[res_delta.values < thr],
                            res_deltaprime.values[res_deltaprime.values < thr]])
    below = np.unique(below)
    rows = []
    A_d, M_d = forms.matrices(DELTA)
    A_p, M_p = forms.matrices(DELTA_PRIME)
    all_vals = np.concatenate([res_delta.values, res_deltaprime.values])
    for i in range(below.size - 1):
        mu = 0.5 * (below[i] + below[i + 1])
        if np.min(np.abs(all_vals - mu)) < 1e-8:
            continue
        n_d = counting(res_delta, mu, A_d, M_d, thr_delta)
        n_p = counting(res_deltaprime, mu, A_p, M_p, thr_deltaprime)
        if n_p < n_d:
            raise ConsistencyError(
                f"counting functions out of order at mu={mu}: "
                f"N_deltaprime={n_p} < N_delta={n_d}")
        rows.append(CountingRow(mu=float(mu), n_delta=n_d, n_deltaprime=n_p))
    return rows


@dataclass(frozen=True)
class PairVerdict:
    n: int                  # 1-based eigenvalue index
    lambda_delta: float
    lambda_deltaprime: float
    gap: float
    error: float
    verdict: str            # "strict" | "indistinguishable" | "violated"

    def as_dict(self):
        return {"n": self.n, "lambda_delta": self.lambda_delta,
                "lambda_deltaprime": self.lambda_deltaprime,
                "gap": self.gap, "error": self.error, "verdict": self.verdict}


@dataclass(frozen=True)
class TheoremAReport:
    pairs: tuple
    thresholds: tuple
    counting: tuple = ()
    convergence: dict = field(default_factory=dict)

    @property
    def all_strict(self):
        return bool(self.pairs) and all(p.verdict == "strict"
                                        for p in self.pairs)

    @property
    def any_violated(self):
        return any(p.verdict == "violated" for p in self.pairs)

    def as_dict(self):
        return {"pairs": [p.as_dict() for p in self.pairs],
                "thresholds": [t.as_dict() for t in self.thresholds],
                "counting": [c.as_dict() for c in self.counting],
                "convergence": self.convergence}


def _clusters(values, tol):
    """Index ranges of eigenvalue clusters (within tol of the neighbor)."""
    spans = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            spans.append((start, i))
            start = i
    lookup = {}
    for s, e in spans:
        for i in range(s, e):
            lookup[i] = (s, e)
    return lookup


def verify_theoremA(res_delta: EigenResult, res_deltaprime: EigenResult,
                    thresholds, errors) -> TheoremAReport:
    """Grade the eigenvalue comparison between the two operators.

    Pairs every n with lambda_n(delta) below the delta-prime threshold.
    The non-strict discrete inequality lambda_n(delta-prime) <=
    lambda_n(delta) must hold for every computed n up to 1e-9 (it is a
    matrix-level consequence of the form comparison); a violation raises
    TheoremViolation carrying the report, since it indicates an assembly
    bug rather than spectral information.

    errors: per-n numerical error budget (scalar or array); a pair is
    "strict" only when the cluster-wise gap exceeds its budget.
    """
    thr_d, thr_p = thresholds
    vd = res_delta.values
    vp = res_deltaprime.values
    ncmp = min(vd.size, vp.size)
    errors = np.broadcast_to(np.asarray(errors, dtype=float), (ncmp,))

    bad = []
    for i in range(ncmp):
        if vp[i] > vd[i] + HARD_TOL:
            bad.append(i)
    scale = max(1.0, float(np.max(np.abs(vd[:ncmp]))) if ncmp else 1.0)
    cd = _clusters(vd[:ncmp], CLUSTER_TOL * scale)
    cp = _clusters(vp[:ncmp], CLUSTER_TOL * scale)

    pairs = []
    for i in range(ncmp):
        if not vd[i] < thr_p.value:
            continue
        if i in bad:
            verdict = "violated"
            gap = float(vd[i] - vp[i])
        else:
            s_d, e_d = cd[i]
            s_p, e_p = cp[i]
            gap = float(vd[i] - vp[i])
            eff_gap = float(vd[s_d] - vp[e_p - 1])  # cluster-wise worst case
            verdict = "strict" if eff_gap > errors[i] else "indistinguishable"
        pairs.append(PairVerdict(n=i + 1, lambda_delta=float(vd[i]),
                                 lambda_deltaprime=float(vp[i]), gap=gap,
                                 error=float(errors[i]), verdict=verdict))
    report = TheoremAReport(pairs=tuple(pairs), thresholds=(thr_d, thr_p))
    if bad:
        raise TheoremViolation(
            f"non-strict discrete inequality violated at n={bad[0] + 1}",
            report=report)
    return report


def richardson(v_h: float, v_h2: float, v_h4: float):
    """Observed order, limit, and error estimate from three nested levels.

    Returns (limit, order, error).  A non-monotone triple gives order NaN
    with the conservative error |v_h - v_h4|.
    """
    d1 = v_h - v_h2
    d2 = v_h2 - v_h4
    if d2 == 0.0 and d1 == 0.0:
        return v_h4, float("nan"), 0.0
    if d2 == 0.0 or d1 * d2 <= 0.0:
        return v_h4, float("nan"), abs(v_h - v_h4)
    order = math.log2(d1 / d2)
    if order <= 0:
        return v_h4, float("nan"), abs(v_h - v_h4)
    limit = v_h4 - d2 / (2.0 ** order - 1.0)
    return limit, order, abs(v_h4 - limit)


def convergence_study(results, n_values=None):
    """Per-eigenvalue Richardson data over the last three refinement levels.

    results: list of EigenResult on nested meshes, coarse to fine.
    Returns {"order": [...], "limit": [...], "error": [...]}.
    """
    if len(results) < 3:
        raise DomainError("need at least three refinement levels")
    r1, r2, r3 = results[-3], results[-2], results[-1]
    k = min(r1.values.size, r2.values.size, r3.values.size)
    if n_values is not None:
        k = min(k, n_values)
    orders, limits, errors = [], [], []
    for i in range(k):
        limit, order, err = richardson(r1.values[i], r2.values[i],
                                       r3.values[i])
        orders.append(order)
        limits.append(limit)
        errors.append(err)
    return {"order": orders, "limit": limits, "error": errors}


@dataclass(frozen=True)
class TruncationStudy:
    operator: str
    halfwidths: tuple
    values: np.ndarray        # (n_L, k) eigenvalues per box size
    deltas: np.ndarray        # (n_L - 1, k) successive |differences|
    stabilized: np.ndarray    # (k,) per-eigenvalue flag
    tolerance: float

    @property
    def final_values(self):
        return self.values[-1]

    @property
    def final_deltas(self):
        return self.deltas[-1] if self.deltas.size else np.zeros(0)

    def as_dict(self):
        return {"operator": self.operator,
                "halfwidths": list(self.halfwidths),
                "values": self.values.tolist(),
                "deltas": self.deltas.tolist(),
                "stabilized": self.stabilized.tolist(),
                "tolerance": self.tolerance}


def truncation_study(geometry: InterfaceGeometry, material: MaterialData,
                     halfwidths, h: float, which: str, refinements: int = 1,
                     k: int = 4, tol: float = DEFAULT_TOL,
                     seed: int = DEFAULT_SEED,
                     stab_tol: float = 1e-6) -> TruncationStudy:
    """Eigenvalues for a family of growing boxes, nested by construction.

    The geometry must be built at the largest halfwidth; the smaller
    boxes are constrained into one master mesh as interior rings and
    realized by pinning all dofs outside them, so the discrete spaces are
    genuinely nested and the eigenvalues decrease monotonically in L.
    Bound states below the threshold decay exponentially, so successive
    deltas shrink geometrically once the box dominates the decay length.
    """
    halfwidths = sorted(set(float(L) for L in halfwidths))
    if len(halfwidths) < 2:
        raise DomainError("need at least two box halfwidths")
    if abs(geometry.halfwidth - halfwidths[-1]) > 1e-12 * halfwidths[-1]:
        raise DomainError("geometry must be built at the largest halfwidth")
    meshes = pipeline.mesh_levels(geometry, h, refinements,
                                  inner_rings=halfwidths[:-1])
    forms = femforms.assemble(meshes[-1], material)
    return truncation_from_forms(forms, which, halfwidths, k, tol=tol,
                                 seed=seed, stab_tol=stab_tol)


def truncation_from_forms(forms, which: str, halfwidths, k: int,
                          tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                          stab_tol: float = 1e-6) -> TruncationStudy:
    """Truncation study on an already assembled master mesh whose inner
    boxes were constrained in as rings."""
    halfwidths = sorted(set(float(L) for L in halfwidths))
    values = []
    shift = None
    for L in halfwidths:
        res, _ = pipeline.solve_restricted(forms, which, L, k, tol=tol,
                                           seed=seed, shift=shift)
        values.append(res.values[:k])
        shift = pipeline.shift_from_previous(res.values)
    kk = min(v.size for v in values)
    vals = np.asarray([v[:kk] for v in values])
    deltas = np.abs(np.diff(vals, axis=0))
    stabilized = deltas[-1] < stab_tol if deltas.size else np.zeros(kk, bool)
    return TruncationStudy(operator=which, halfwidths=tuple(halfwidths),
                           values=vals, deltas=deltas, stabilized=stabilized,
                           tolerance=stab_tol)


def error_budget(convergence: dict, trunc_delta, tol: float, k: int):
    """Per-eigenvalue budget: Richardson estimate + truncation delta +
    10 * solver tolerance."""
    rich = np.asarray(convergence["error"][:k], dtype=float)
    td = np.broadcast_to(np.asarray(trunc_delta, dtype=float), rich.shape) \
        if np.ndim(trunc_delta) == 0 else np.asarray(trunc_delta)[:k]
    out = rich + td + 10.0 * tol
    return out
