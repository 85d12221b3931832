"""Closed-form and quadrature solutions of the reducible cases."""

from bcheun import BcHeunParams, residual
from bcheun.expansions import quadrature_special, special_params
from bcheun.reference import closed_form_eps0, quadrature_alpha_q_zero

z = 0.6 + 0.3j

p = BcHeunParams(gamma=0.7, delta=0.4, epsilon=0, alpha=1.1, q=0.5)
u = closed_form_eps0(p, z, c1=1, c2=0.5, derivatives=True)
print(f"epsilon = 0 (Kummer functions):   u = {u[0]:.12f}  residual {residual(p, z, *u).relative:.1e}")

p = BcHeunParams(gamma=0.7, delta=0.4, epsilon=0.9, alpha=0, q=0)
u = quadrature_alpha_q_zero(p, z, c1=1, c2=1, derivatives=True)
print(f"alpha = q = 0 (one quadrature):   u = {u[0]:.12f}  residual {residual(p, z, *u).relative:.1e}")

p = special_params(gamma=0.7, delta=0.4, epsilon=0.9)
u = quadrature_special(p, z, c1=1, c2=0.5, derivatives=True)
print(f"alpha = -epsilon, q root:         u = {u[0]:.12f}  residual {residual(p, z, *u).relative:.1e}")
