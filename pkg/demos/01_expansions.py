"""Evaluate the four resummed expansions and compare them with the origin series.

Each expansion fixes its own solution of the equation; projecting it onto the
two Frobenius solutions at the origin gives an independent value to compare.
"""

from bcheun import BcHeunParams, expand
from bcheun.reference import match_to_basis, origin_basis

p = BcHeunParams(gamma=0.5, delta=0.3, epsilon=1.0, alpha=1.2, q=0.7)
z0 = p.z0
basis = origin_basis(p, 150)
print(f"z0 = {z0}")

for kind in ("beta_single", "beta_double", "gamma_delta", "gamma_eps"):
    sol = expand(kind, p, 60)
    base = sol.recovery_point
    u, du, _ = sol.evaluate(base)
    A, B = match_to_basis(basis, base, u, du)
    z = 0.35 * z0 if sol.in_region(0.35 * z0) else sol.center * 0.8
    ref = A * basis[0](z) + B * basis[1](z)
    print(f"{kind:12s} center={sol.center:.4f} radius={sol.radius:.4f} "
          f"u({z:.4f}) = {sol(z):.12f}  oracle diff = {abs(sol(z) - ref):.1e}  "
          f"residual = {sol.residual(z):.1e}  converged = {sol.converged_at(z)}")
