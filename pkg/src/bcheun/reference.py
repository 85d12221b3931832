"""Independent oracles for the biconfluent Heun equation.

* :func:`origin_series` - Frobenius series about z = 0 (both exponents).
* :func:`integrate` - adaptive Runge-Kutta along a straight complex segment.
* :func:`closed_form_eps0` - ε = 0 solution through Kummer/Tricomi functions.
* :func:`quadrature_alpha_q_zero` - α = q = 0 solution as a quadrature.

None of these touch the auxiliary equations or the expansion machinery, so
they can certify the expansions without sharing code paths with them.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate

from . import special
from .errors import (
    ConditionsNotMet,
    DegenerateS0,
    GammaNonpositiveInteger,
    ParameterError,
    PathTooCloseToSingularity,
    StepSizeUnderflow,
)
from .frobenius import eval_frobenius
from .model import PARAM_ZERO, BcHeunParams

DEFAULT_ODE_TOL = 1e-12
QUAD_TOL = 1e-12
CSV_COLUMNS = ("z_re", "z_im", "u_re", "u_im", "du_re", "du_im")


def _write_csv(rows, fh=None) -> str:
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for z, u, du in rows:
        w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(u.real)),
                    repr(float(u.imag)), repr(float(du.real)), repr(float(du.imag))])
    return buf.getvalue() if fh is None else ""


def crosses_branch_cut(a: complex, b: complex) -> bool:
    """True if the closed segment a→b meets the cut (-∞, 0]."""
    a, b = complex(a), complex(b)
    if (a.imag > 0 and b.imag > 0) or (a.imag < 0 and b.imag < 0):
        return False
    if a.imag == b.imag:
        # segment on the real axis
        if a.imag != 0:
            return False
        return min(a.real, b.real) <= 0
    t = a.imag / (a.imag - b.imag)
    x = a.real + t * (b.real - a.real)
    return x <= 0


# ---------------------------------------------------------------------------
# origin series


@dataclass(frozen=True)
class OriginSeries:
    """``u = z^ρ Σ c_n z^n`` about the origin, ``c_0 = 1``.

    ``radius_hint`` is |z0| (the scale of the auxiliary singularity) or
    ``inf`` when α = 0; it is a scale for choosing test points, not a radius
    of convergence (the equation has no other finite singularity).
    """

    exponent: complex
    coeffs: np.ndarray
    radius_hint: float

    def evaluate(self, z) -> tuple[complex, complex, complex]:
        return eval_frobenius(self.coeffs, self.exponent, complex(z))

    def __call__(self, z) -> complex:
        return self.evaluate(z)[0]

    def to_csv(self, points, fh=None) -> str:
        rows = []
        for z in points:
            u, du, _ = self.evaluate(z)
            rows.append((complex(z), u, du))
        return _write_csv(rows, fh)


def origin_series(p: BcHeunParams, N: int, exponent: str = "0") -> OriginSeries:
    """Frobenius series of the Heun equation about z = 0.

    ``exponent="0"`` gives the branch regular at the origin (needs γ not a
    non-positive integer); ``exponent="1-gamma"`` gives ``z^(1-γ)`` times a
    power series (needs γ not in {2, 3, ...}).  The coefficients obey

        (n+ρ+1)(n+ρ+γ) c_(n+1) + (δ(n+ρ) - q) c_n + (α + ε(n+ρ-1)) c_(n-1) = 0.
    """
    if exponent in ("0", 0):
        rho = 0j
        if special.is_nonpositive_integer(p.gamma):
            raise GammaNonpositiveInteger(f"gamma={p.gamma} is a non-positive integer")
    elif exponent in ("1-gamma", "1-g"):
        rho = 1 - p.gamma
        if special.is_nonpositive_integer(2 - p.gamma):
            raise GammaNonpositiveInteger(f"exponent 1-gamma branch undefined for gamma={p.gamma}")
    else:
        raise ParameterError(f"unknown exponent {exponent!r}")
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    for n in range(N):
        rhs = -(d * (n + rho) - q) * c[n]
        if n >= 1:
            rhs -= (a + e * (n + rho - 1)) * c[n - 1]
        c[n + 1] = rhs / ((n + rho + 1) * (n + rho + g))
    radius = abs(p.q / p.alpha) if abs(p.alpha) > PARAM_ZERO else math.inf
    return OriginSeries(complex(rho), c, radius)


def origin_basis(p: BcHeunParams, N: int = 120) -> tuple[OriginSeries, OriginSeries]:
    """Both Frobenius solutions at the origin (γ must not be an integer)."""
    if special.is_integer(p.gamma):
        raise GammaNonpositiveInteger("origin basis needs non-integer gamma")
    return origin_series(p, N, "0"), origin_series(p, N, "1-gamma")


def match_to_basis(basis, z_b, u, du) -> tuple[complex, complex]:
    """Coefficients (A, B) with ``A f0 + B f1`` matching (u, u') at ``z_b``."""
    f0, df0, _ = basis[0].evaluate(z_b)
    f1, df1, _ = basis[1].evaluate(z_b)
    M = np.array([[f0, f1], [df0, df1]], dtype=complex)
    A, B = np.linalg.solve(M, np.array([u, du], dtype=complex))
    return complex(A), complex(B)


# ---------------------------------------------------------------------------
# numerical integration


@dataclass(frozen=True)
class OdeTrajectory:
    path: tuple
    values: tuple      # ((u, u'), ...) at each entry of ``path``
    tol: float

    @property
    def end(self) -> tuple[complex, complex]:
        return self.values[-1]

    def to_csv(self, fh=None) -> str:
        return _write_csv([(z, u, du) for z, (u, du) in zip(self.path, self.values)], fh)


def _distance_to_segment(pt: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(pt - a)
    t = ((pt - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - pt)


def integrate(p: BcHeunParams, z_from, init, z_to, tol: float = DEFAULT_ODE_TOL,
              samples=None, max_steps: int = 1_000_000) -> OdeTrajectory:
    """Integrate the equation along the straight segment ``z_from → z_to``.

    Uses the Dormand-Prince 5(4) pair of :func:`scipy.integrate.solve_ivp`
    on the segment parameter ``t ∈ [0, 1]``.  ``init`` is ``(u, u')`` at
    ``z_from``; ``samples`` optionally lists interior ``t`` values to record.
    """
    z_from, z_to = complex(z_from), complex(z_to)
    u0, du0 = (complex(x) for x in init)
    has_z0 = abs(p.alpha) > PARAM_ZERO
    scale = abs(p.q / p.alpha) if has_z0 and abs(p.q) > PARAM_ZERO else max(abs(z_from), abs(z_to), 1.0)
    guard = 1e-3 * scale
    avoid = [0j] + ([p.q / p.alpha] if has_z0 and abs(p.q) > PARAM_ZERO else [])
    for pt in avoid:
        if _distance_to_segment(pt, z_from, z_to) < guard:
            raise PathTooCloseToSingularity(f"segment {z_from}->{z_to} passes within {guard:.3g} of {pt}")
    dz = z_to - z_from
    if dz == 0:
        return OdeTrajectory((z_from,), ((u0, du0),), tol)
    if u0 == 0 and du0 == 0:
        # unique solution of the initial-value problem is identically zero
        ts = [0.0] + sorted(float(t) for t in (samples or []) if 0 < t < 1) + [1.0]
        return OdeTrajectory(tuple(z_from + t * dz for t in ts), tuple((0j, 0j) for _ in ts), tol)
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q

    def rhs(t, y):
        z = z_from + t * dz
        u, du = y
        d2 = -(g / z + d + e * z) * du - (a * z - q) / z * u
        return np.array([du * dz, d2 * dz])

    ts = [0.0] + sorted(float(t) for t in (samples or []) if 0 < t < 1) + [1.0]
    yscale = max(abs(u0), abs(du0), 1e-300)
    first = min(0.5, scale / 100 / abs(dz))
    sol = _integrate.solve_ivp(rhs, (0.0, 1.0), np.array([u0, du0]), method="RK45",
                               rtol=tol, atol=tol * yscale, t_eval=ts, first_step=first)
    if sol.status != 0:
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    if sol.nfev > 6 * max_steps:
        raise StepSizeUnderflow("integration exceeded the step budget")
    path = tuple(z_from + t * dz for t in sol.t)
    values = tuple((complex(sol.y[0, i]), complex(sol.y[1, i])) for i in range(len(sol.t)))
    return OdeTrajectory(path, values, tol)


def integrate_path(p: BcHeunParams, waypoints, init, tol: float = DEFAULT_ODE_TOL) -> OdeTrajectory:
    """Chain :func:`integrate` over a polyline of waypoints."""
    pts = [complex(w) for w in waypoints]
    path, values = [pts[0]], [tuple(complex(x) for x in init)]
    for a, b in zip(pts[:-1], pts[1:]):
        seg = integrate(p, a, values[-1], b, tol)
        path.append(b)
        values.append(seg.end)
    return OdeTrajectory(tuple(path), tuple(values), tol)


# ---------------------------------------------------------------------------
# closed forms


def closed_form_eps0(p: BcHeunParams, z, c1=1.0, c2=0.0, *, branch: int = 1,
                     derivatives: bool = False):
    """ε = 0 solution ``e^(sz) [C1 1F1(a; γ; s0 z) + C2 U(a; γ; s0 z)]``.

    ``s0 = ±sqrt(δ² - 4α)`` (``branch`` picks the sign), ``s = -(δ + s0)/2``
    and ``a = (q - γ s)/s0``.  With ``derivatives=True`` returns
    ``(u, u', u'')``.
    """
    if abs(p.epsilon) > PARAM_ZERO:
        raise ConditionsNotMet("closed_form_eps0 needs epsilon = 0")
    if abs(p.epsilon) != 0:
        warnings.warn("epsilon is tiny but nonzero; treated as zero", RuntimeWarning, stacklevel=2)
    g = p.gamma
    if special.is_nonpositive_integer(g):
        raise ConditionsNotMet(f"gamma={g} is a non-positive integer")
    s0 = cmath.sqrt(p.delta ** 2 - 4 * p.alpha) * (1 if branch >= 0 else -1)
    if abs(s0) <= PARAM_ZERO * max(1.0, abs(p.delta)):
        raise DegenerateS0("delta^2 = 4 alpha: repeated exponent not supported")
    s = -(p.delta + s0) / 2
    a = (p.q - g * s) / s0
    z = complex(z)
    x = s0 * z
    c1, c2 = complex(c1), complex(c2)

    def kummer(k):
        # k-th derivative of 1F1(a; g; x) in x
        coef = 1.0 + 0j
        for j in range(k):
            coef *= (a + j) / (g + j)
        return coef * special.kummer_1f1(a + k, g + k, x).value if coef != 0 else 0j

    def tricomi(k):
        coef = 1.0 + 0j
        for j in range(k):
            coef *= -(a + j)
        return coef * special.tricomi_u(a + k, g + k, x).value if coef != 0 else 0j

    nder = 3 if derivatives else 1
    Y = []
    for k in range(nder):
        val = 0j
        if c1 != 0:
            val += c1 * kummer(k)
        if c2 != 0:
            val += c2 * tricomi(k)
        Y.append(val)
    ex = cmath.exp(s * z)
    if not derivatives:
        return ex * Y[0]
    u = ex * Y[0]
    du = ex * (s * Y[0] + s0 * Y[1])
    d2u = ex * (s * s * Y[0] + 2 * s * s0 * Y[1] + s0 * s0 * Y[2])
    return u, du, d2u


def _path_quad(f, za: complex, zb: complex) -> complex:
    """∫ f along the straight segment za→zb (adaptive Gauss-Kronrod)."""
    dz = zb - za
    if dz == 0:
        return 0j
    val, _ = _integrate.quad(lambda t: f(za + t * dz) * dz, 0.0, 1.0, complex_func=True,
                             epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=500)
    return complex(val)


def quadrature_alpha_q_zero(p: BcHeunParams, z, c1=1.0, c2=1.0, *, z_b: complex = 1.0,
                            derivatives: bool = False):
    """α = q = 0 solution ``C1 + C2 ∫_(z_b)^z e^(-δt-εt²/2) t^(-γ) dt``."""
    if abs(p.alpha) > PARAM_ZERO or abs(p.q) > PARAM_ZERO:
        raise ConditionsNotMet("quadrature_alpha_q_zero needs alpha = q = 0")
    z, z_b = complex(z), complex(z_b)
    if z == 0 or crosses_branch_cut(z_b, z):
        raise ParameterError("quadrature path must avoid the cut (-inf, 0]")
    g, d, e = p.gamma, p.delta, p.epsilon

    def f(t):
        return cmath.exp(-d * t - e * t * t / 2 - g * cmath.log(t))

    u = complex(c1) + complex(c2) * _path_quad(f, z_b, z)
    if not derivatives:
        return u
    fz = f(z)
    return u, complex(c2) * fz, complex(c2) * fz * (-d - e * z - g / z)


__all__ = [
    "CSV_COLUMNS",
    "OdeTrajectory",
    "OriginSeries",
    "closed_form_eps0",
    "crosses_branch_cut",
    "integrate",
    "integrate_path",
    "match_to_basis",
    "origin_basis",
    "origin_series",
    "quadrature_alpha_q_zero",
]
