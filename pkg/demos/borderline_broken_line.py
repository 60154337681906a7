"""Borderline comparison on a broken line.

At beta = 4/alpha the two 1d point models (a delta and a delta-prime
coupling on the real line) have exactly the same single bound state, so
any strict ordering between the 2d operators on a broken line is a pure
geometry effect.  This script shows both halves of that statement:

  1. the 1d reference models are degenerate to oracle accuracy;
  2. the 2d eigenvalues on a broken line split strictly, with a gap far
     above the numerical error budget, and the gap grows as the corner
     sharpens.
"""

import math
import os

from leakyfem import cli, oracles, svgplot

ALPHA = 2.0
BETA = 4.0 / ALPHA
OUT = os.path.join(os.path.dirname(__file__), "out")

print("== 1d point models at the borderline ==")
d1 = oracles.point_delta_1d(ALPHA).eigenvalues[0]
p1 = oracles.point_deltaprime_1d(BETA).eigenvalues[0]
print(f"  delta coupling  alpha={ALPHA}:  lambda = {d1:.10f}")
print(f"  delta' coupling beta={BETA}:   lambda = {p1:.10f}")
print(f"  difference: {abs(d1 - p1):.2e}  (degenerate at -alpha^2/4 = -1)")

print("\n== 2d broken line, same strengths ==")
thetas = [math.pi / 6, math.pi / 4, math.pi / 3]
gaps = []
for theta in thetas:
    cfg = {
        "geometry": {"kind": "broken_line", "theta": theta, "halfwidth": 12.0},
        "material": {"alpha": ALPHA, "beta": BETA},
        "discretization": {"h": 0.5, "refinements": 2,
                           "box_halfwidths": [6.0, 9.0, 12.0],
                           "truncation_refinements": 1},
        "solver": {"k": 2, "tol": 1e-9},
    }
    doc, code = cli.run_solve(cfg)
    if doc["pairs"]:
        pr = doc["pairs"][0]
        gaps.append(pr["gap"])
        print(f"  theta={theta:.4f}: lambda1(delta)={pr['lambda_delta']:+.6f}"
              f"  lambda1(delta')={pr['lambda_deltaprime']:+.6f}"
              f"  gap={pr['gap']:.4f} (budget {pr['error']:.1e})"
              f"  -> {pr['verdict']}")
    else:
        gaps.append(float("nan"))
        print(f"  theta={theta:.4f}: no state below the threshold at this "
              "resolution (binding too weak)")

os.makedirs(OUT, exist_ok=True)
svgplot.line_plot(os.path.join(OUT, "borderline_gap_vs_theta.svg"),
                  thetas, [gaps], ["gap lambda_1"],
                  title="borderline gap vs corner angle",
                  xlabel="theta (rad)", ylabel="lambda1(delta) - lambda1(delta')")
print(f"\nwrote {OUT}/borderline_gap_vs_theta.svg")
