"""Reference tables from the 1d oracles, against their closed forms."""

from leakyfem import oracles

print("point delta coupling on the line: bound state vs -alpha^2/4")
for alpha in (0.5, 1.0, 2.0, 4.0):
    got = oracles.point_delta_1d(alpha).eigenvalues[0]
    ref = -0.25 * alpha * alpha
    print(f"  alpha={alpha:<4}: {got:+.10f}   closed form {ref:+.10f}   "
          f"diff {got - ref:+.1e}")

print("\npoint delta' coupling on the line: bound state vs -4/beta^2")
for beta in (1.0, 2.0, 4.0, 8.0):
    got = oracles.point_deltaprime_1d(beta).eigenvalues[0]
    ref = -4.0 / (beta * beta)
    print(f"  beta={beta:<4}: {got:+.10f}   closed form {ref:+.10f}   "
          f"diff {got - ref:+.1e}")

print("\nborderline pairing beta = 4/alpha: the two models coincide")
for alpha in (1.0, 2.0, 5.0):
    d = oracles.point_delta_1d(alpha).eigenvalues[0]
    p = oracles.point_deltaprime_1d(4.0 / alpha).eigenvalues[0]
    print(f"  alpha={alpha}, beta={4.0 / alpha}: "
          f"{d:+.10f} vs {p:+.10f}  diff {abs(d - p):.1e}")

print("\ncircle of growing radius, delta strength 2: the ground state")
print("approaches the straight-line value -alpha^2/4 = -1 from below")
for R in (1.0, 2.0, 10.0, 40.0):
    r = oracles.circle_delta_radial(R, 2.0, m_max=0)
    print(f"  R={R:<4}: lambda_1(m=0) = {r.eigenvalues[0]:+.8f}")
