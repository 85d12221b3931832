"""Search for parameters where the single-Beta series is a finite sum."""

from bcheun import check_termination, expand_beta_single, find_terminating_params
from bcheun.expansions import ring_points

p = find_terminating_params(gamma=0.5, epsilon=1.0, N=1, seed_q=1.0, seed_delta=1.0)
print(f"alpha = {p.alpha}, q = {p.q:.10f}, delta = {p.delta:.10f}")
cert = check_termination(p, "beta_single", 1)
print(cert.to_json())

sol = expand_beta_single(p, 1)
worst = max(sol.residual(z, allow_outside=True) for z in ring_points(0.5 * abs(p.z0)))
print(f"two-term solution: worst residual on |z| = |z0|/2 is {worst:.1e}")
