"""Residual of each expansion as the truncation order grows."""

from bcheun import BcHeunParams, expand

p = BcHeunParams(gamma=0.5, delta=0.3, epsilon=1.0, alpha=1.2, q=0.7)
z = 0.4 * p.z0 * complex(1, 0.1)

print("N    " + "  ".join(f"{k:>12s}" for k in ("beta_single", "beta_double", "gamma_delta", "gamma_eps")))
for N in (5, 10, 20, 40, 60):
    row = []
    for kind in ("beta_single", "beta_double", "gamma_delta", "gamma_eps"):
        sol = expand(kind, p, N)
        row.append(sol.residual(z, allow_outside=True))
    print(f"{N:<4d} " + "  ".join(f"{r:12.2e}" for r in row))
