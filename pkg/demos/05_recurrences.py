"""Recurrence bands produced by the Frobenius engine against their printed forms."""

from bcheun import BcHeunParams
from bcheun.frobenius import OdeKind, indicial_exponents, build_local_ode, recurrence_report
from bcheun.model import singular_structure

p = BcHeunParams(gamma=0.5, delta=0.3, epsilon=1.0, alpha=1.2, q=0.7)
s = singular_structure(p)

print("four-term band about z0:", {k: f"{v:.1e}" for k, v in recurrence_report(p, OdeKind.AUX_V12).items()})
rep = recurrence_report(p, OdeKind.AUX_W23)
print("five-term band about z1:", {k: (f"{v:.1e}" if isinstance(v, float) else v) for k, v in rep.items()})
print("exponents of the u'' equation at z1:", indicial_exponents(build_local_ode(OdeKind.AUX_W23, p), s.z1))
print("The leading slot differs from the printed T_n because the exponents at z1 are {0, 2};")
print("the solution with u''(z1) = 0 also has u'''(z1) = 0, so no solution starts at (z - z1)^1.")
