"""Compact interface: cross-validation and a strict comparison run.

A circle supports finitely many negative eigenvalues, one per low angular
mode.  The finite-element values are checked against an independent radial
finite-difference oracle, and a run with beta reduced below 4/alpha on
half the circle shows every pair ordered strictly.
"""

from leakyfem import cli, femforms, geometry, oracles, pipeline
from leakyfem import spectral_analysis as sa

R, ALPHA = 1.0, 5.0
BETA = 4.0 / ALPHA

print("== radial oracle, delta coupling ==")
orc = oracles.circle_delta_radial(R, ALPHA, m_max=2)
for m, eigs in enumerate(orc.per_mode):
    for e in eigs:
        mult = 1 if m == 0 else 2
        print(f"  mode m={m} (multiplicity {mult}): lambda = {e:.8f}")

print("\n== finite elements on three nested meshes ==")
g = geometry.make_circle(R, (0.0, 0.0), 3.5, 384)
mat = geometry.MaterialData.constant(g, ALPHA, BETA)
meshes = pipeline.mesh_levels(g, 0.2, 2)
forms = pipeline.assemble_levels(meshes, mat)
res = pipeline.cascade_solve(forms, sa.DELTA, 1)
conv = sa.convergence_study(res)
print(f"  lambda_1 per level: {[float(r.values[0]) for r in res]}")
print(f"  observed order {conv['order'][0]:.3f}, "
      f"limit {conv['limit'][0]:.8f}, estimate {conv['error'][0]:.2e}")
print(f"  oracle {orc.eigenvalues[0]:.8f}, "
      f"difference {abs(res[-1].values[0] - orc.eigenvalues[0]):.2e}")

print("\n== strict comparison: beta lowered on half the circle ==")
cfg = {
    "geometry": {"kind": "circle", "radius": R, "halfwidth": 3.5,
                 "n_chords": 64},
    "material": {"alpha": ALPHA,
                 "beta": {"default": BETA,
                          "overrides": [{"segments": list(range(32)),
                                         "value": 0.8 * BETA}]}},
    "discretization": {"h": 0.15, "refinements": 2,
                       "box_halfwidths": [2.5, 3.5],
                       "truncation_refinements": 1},
    "solver": {"k": 5, "tol": 1e-9},
}
doc, code = cli.run_solve(cfg)
for p in doc["pairs"]:
    print(f"  n={p['n']}: {p['lambda_delta']:+.6f} vs "
          f"{p['lambda_deltaprime']:+.6f}  gap {p['gap']:.3f}  "
          f"-> {p['verdict']}")
print(f"exit status {code} (0 means every pair strict)")
