"""Resummed expansions of biconfluent Heun solutions.

The derivative of a solution is written as a kernel times the Frobenius
series of an auxiliary equation; integrating term by term turns every power
into an incomplete Beta or incomplete Gamma function:

* ``BETA_SINGLE``: ``u' = z^(-γ) v``, ``v`` expanded about ``z0 = q/α``;
  terms ``B(1-γ, 1+n+μ; z/z0)``.
* ``BETA_DOUBLE``: ``u'' = z^(-1-γ) w``, ``w`` expanded about a root
  ``z1`` (or ``z2``); terms ``z B(-γ, 1+m; z/z1) - z1 B(1-γ, 1+m; z/z1)``.
* ``GAMMA_DELTA``: ``u' = e^(-δz) z^(-γ) v``, ``v`` expanded about 0;
  terms are incomplete Gamma functions of ``δz``.
* ``GAMMA_EPS``: ``u' = e^(-εz²/2) z^(-γ) v``; incomplete Gamma functions
  of ``εz²/2``.

The constants of integration are fixed pointwise: the Heun equation is
linear in ``u`` with coefficient ``(αz - q)/z``, so ``u`` follows from
``u'`` and ``u''`` algebraically (and ``u'`` from ``u''``, ``u'''`` through
the equation for ``u'``).
"""

from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import special
from .errors import (
    AlphaPlusEpsZero,
    AlphaZero,
    AtAuxRoot,
    AtExtraSingularity,
    BetaParameterPole,
    ConditionsNotMet,
    DeltaZero,
    EpsilonZero,
    GammaParameterPole,
    NoRoot,
    OriginSingular,
    OutsideRegion,
    ParameterError,
    PoleAtParameter,
    QZero,
    RootAtOriginChosen,
)
from .frobenius import (
    FrobeniusSeries,
    OdeKind,
    build_local_ode,
    frobenius_coeffs,
    indicial_exponents,
    synthesize_recurrence,
)
from .model import PARAM_ZERO, BcHeunParams, residual, singular_structure
from .reference import crosses_branch_cut, _path_quad


class ExpansionKind(str, enum.Enum):
    BETA_SINGLE = "beta_single"
    BETA_DOUBLE = "beta_double"
    GAMMA_DELTA = "gamma_delta"
    GAMMA_EPS = "gamma_eps"


class VKind(str, enum.Enum):
    Z_GAMMA = "z_gamma"        # v = z^γ u'
    EXP_DELTA = "exp_delta"    # v = e^(δz) z^γ u'
    EXP_EPS = "exp_eps"        # v = e^(εz²/2) z^γ u'


# fraction of the convergence radius inside which a point counts as
# comfortably converged for the default recovery point
RECOVERY_FRACTION = 0.5
CONVERGED_TOL = 1e-10
MACHINE_EPS = 1e-16


# ---------------------------------------------------------------------------
# pointwise recovery


def u_from_derivatives(p: BcHeunParams, z, u1, u2) -> complex:
    """Solve the Heun equation for ``u`` given ``u'`` and ``u''`` at ``z``."""
    z = complex(z)
    if z == 0:
        raise OriginSingular("u cannot be recovered at z = 0")
    den = p.alpha * z - p.q
    if abs(den) <= 1e-14 * (abs(p.alpha * z) + abs(p.q)):
        raise AtExtraSingularity(f"z={z} coincides with z0 = q/alpha")
    return -z / den * (u2 + (p.gamma / z + p.delta + p.epsilon * z) * u1)


def _v_kernel(p: BcHeunParams, kind: VKind, z: complex):
    # u' = K v and K'/K for each substitution
    g = p.gamma
    kind = VKind(kind)
    if kind is VKind.Z_GAMMA:
        logk, dlog = -g * cmath.log(z), -g / z
    elif kind is VKind.EXP_DELTA:
        logk, dlog = -p.delta * z - g * cmath.log(z), -p.delta - g / z
    else:
        logk, dlog = -p.epsilon * z * z / 2 - g * cmath.log(z), -p.epsilon * z - g / z
    return cmath.exp(logk), dlog


def recover_u_from_v(p: BcHeunParams, v_kind, v, v1, z) -> complex:
    """``u(z)`` from an auxiliary function ``v`` and its derivative.

    ``v_kind`` selects the substitution (:class:`VKind`); powers of ``z`` use
    the principal branch.
    """
    z = complex(z)
    if z == 0:
        raise OriginSingular("u cannot be recovered at z = 0")
    K, dlog = _v_kernel(p, v_kind, z)
    u1 = K * v
    u2 = K * (v1 + dlog * v)
    return u_from_derivatives(p, z, u1, u2)


def _v_from_derivatives(p: BcHeunParams, z: complex, v1, v2) -> complex:
    ode = build_local_ode(OdeKind.AUX_V22, p)
    A, B, C = ode.coefficients_at(z)
    if abs(C) <= 1e-12 * (abs(A) + abs(B) + abs(C)):
        raise AtAuxRoot(f"z={z} is a root of the last coefficient of the equation for u'")
    return -(A * v2 + B * v1) / C


def recover_v_from_w(p: BcHeunParams, w, w1, z) -> complex:
    """``v = u'`` at ``z`` from ``w = z^(1+γ) v'`` and ``w'``."""
    z = complex(z)
    if z == 0:
        raise OriginSingular("v cannot be recovered at z = 0")
    if abs(p.alpha * z - p.q) <= 1e-14 * (abs(p.alpha * z) + abs(p.q)):
        raise AtExtraSingularity(f"z={z} coincides with z0 = q/alpha")
    K = cmath.exp(-(1 + p.gamma) * cmath.log(z))
    v1 = K * w
    v2 = K * (w1 - (1 + p.gamma) * w / z)
    return _v_from_derivatives(p, z, v1, v2)


# ---------------------------------------------------------------------------
# term kernels


def _gamma_antiderivative(s: complex, z: complex, scale: complex) -> complex:
    """``∫_0^z e^(-scale t) t^(s-1) dt`` continued in ``s`` (principal ``z^s``)."""
    x = scale * z
    if x == 0:
        return cmath.exp(s * cmath.log(z)) / s
    low = special.inc_gamma_lower(s, x).value
    return low * cmath.exp(s * (cmath.log(z) - cmath.log(x)))


def _beta_single_terms(p, series, z):
    z0 = series.center
    x = z / z0
    mu, N = series.mu, series.N
    a = 1 - p.gamma
    seq = special.inc_beta_sequence(a, x, int(mu.real) + N)
    m = np.arange(N + 1) + int(mu.real)
    pref = cmath.exp((1 - p.gamma) * cmath.log(z0)) * (-z0) ** m
    K = cmath.exp(-p.gamma * (cmath.log(z0) + cmath.log(x)))
    return pref * seq[m], K, -p.gamma / z


def _gamma_delta_terms(p, series, z):
    s = series.mu + 1 - p.gamma + np.arange(series.N + 1)
    T = np.array([_gamma_antiderivative(sk, z, p.delta) for sk in s])
    K = cmath.exp(-p.delta * z - p.gamma * cmath.log(z))
    return T, K, -p.delta - p.gamma / z


def _gamma_eps_terms(p, series, z):
    s = series.mu + 1 - p.gamma + np.arange(series.N + 1)
    y = p.epsilon * z * z / 2
    logz = cmath.log(z)
    T = np.empty(len(s), dtype=complex)
    for i, sk in enumerate(s):
        a = sk / 2
        if y == 0:
            T[i] = cmath.exp(sk * logz) / sk
            continue
        low = special.inc_gamma_lower(a, y).value
        T[i] = 0.5 * low * cmath.exp(sk * logz - a * cmath.log(y))
    K = cmath.exp(-y - p.gamma * logz)
    return T, K, -p.epsilon * z - p.gamma / z


def _beta_double_terms(p, series, z):
    z1 = series.center
    x = z / z1
    mu, N = int(series.mu.real), series.N
    bm = special.inc_beta_sequence(-p.gamma, x, mu + N)
    b1 = special.inc_beta_sequence(1 - p.gamma, x, mu + N)
    m = np.arange(N + 1) + mu
    pref = cmath.exp(-p.gamma * cmath.log(z1)) * (-z1) ** m
    V = pref * bm[m]
    U = pref * (z * bm[m] - z1 * b1[m])
    K = cmath.exp(-(1 + p.gamma) * (cmath.log(z1) + cmath.log(x)))
    return U, V, K, -(1 + p.gamma) / z


_SINGLE_TERMS = {
    ExpansionKind.BETA_SINGLE: _beta_single_terms,
    ExpansionKind.GAMMA_DELTA: _gamma_delta_terms,
    ExpansionKind.GAMMA_EPS: _gamma_eps_terms,
}


def term_derivative_error(sol: "ExpansionSolution", z, h: float = 1e-4) -> float:
    """Largest relative mismatch between a finite difference of each term and
    the integrand it is supposed to integrate (``K (z-c)^(n+μ)``).

    Uses a fourth-order central difference.  Terms whose derivative is too
    small against the term itself to be resolved by differencing are skipped.
    """
    z = complex(z)
    hh = h * max(abs(z - sol.center), 1e-3)
    offsets = (-2, -1, 1, 2)
    weights = (1 / 12, -2 / 3, 2 / 3, -1 / 12)
    n = np.arange(sol.series.N + 1)
    if sol.kind is ExpansionKind.BETA_DOUBLE:
        def f(x):
            U, V, _, _ = _beta_double_terms(sol.params, sol.series, x)
            return np.stack([U, V])
        U, V, K, _ = _beta_double_terms(sol.params, sol.series, z)
        vals = np.stack([U, V])
        powers = (z - sol.center) ** (n + sol.series.mu)
        exact = np.stack([V, K * powers])
    else:
        g = _SINGLE_TERMS[sol.kind]

        def f(x):
            return g(sol.params, sol.series, x)[0][None, :]
        T, K, _ = g(sol.params, sol.series, z)
        vals = T[None, :]
        h0 = z - sol.center
        exact = (K * np.exp((n + sol.series.mu) * cmath.log(h0)))[None, :]
    fd = sum(w * f(z + o * hh) for o, w in zip(offsets, weights)) / hh
    resolvable = np.abs(exact) * hh >= 1e-7 * np.abs(vals)
    if not np.any(resolvable):
        raise ParameterError("no term is resolvable by finite differences at this point")
    err = np.abs(fd - exact) / np.maximum(np.abs(exact), 1e-300)
    return float(np.max(err[resolvable]))


# ---------------------------------------------------------------------------
# solution object


@dataclass(frozen=True)
class ExpansionSolution:
    """A truncated expansion with its constants of integration.

    ``evaluate`` returns ``(u, u', u'')``.  Points outside ``in_region`` raise
    :class:`OutsideRegion` unless ``allow_outside`` is given.
    """

    kind: ExpansionKind
    params: BcHeunParams
    series: FrobeniusSeries
    c0: complex
    c1: complex
    radius: float
    region: str
    root_choice: str | None = None
    c0_mode: str = "recover"
    recovery_point: complex | None = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return self.series.N

    @property
    def center(self) -> complex:
        return self.series.center

    def in_region(self, z) -> bool:
        z = complex(z)
        if z == 0:
            return False
        if abs(z - self.center) >= self.radius:
            return False
        if self.kind is ExpansionKind.BETA_SINGLE:
            return abs(z) <= abs(self.center) * (1 + 1e-14)
        return True

    def _check(self, z, allow_outside):
        if z == 0:
            raise OriginSingular("expansions are not evaluated at z = 0")
        if not allow_outside and not self.in_region(z):
            raise OutsideRegion(f"z={z} is outside validity region ({self.region})")

    def evaluate(self, z, *, allow_outside: bool = False) -> tuple[complex, complex, complex]:
        z = complex(z)
        self._check(z, allow_outside)
        return _evaluate(self, z)

    def __call__(self, z, **kw) -> complex:
        return self.evaluate(z, **kw)[0]

    def residual(self, z, *, allow_outside: bool = False) -> float:
        u, u1, u2 = self.evaluate(z, allow_outside=allow_outside)
        return residual(self.params, z, u, u1, u2).relative

    def term_magnitudes(self, z) -> np.ndarray:
        """``|a_n T_n(z)|`` for every term of the truncation (no region check)."""
        z = complex(z)
        a = self.series.coeffs
        if self.kind is ExpansionKind.BETA_DOUBLE:
            U, V, _, _ = _beta_double_terms(self.params, self.series, z)
            return np.abs(a * U)
        T, _, _ = _SINGLE_TERMS[self.kind](self.params, self.series, z)
        return np.abs(a * T)

    def tail_contributions(self, z) -> np.ndarray:
        """``|a_n (T_n(z) - T_n(z_r))|``: what each term adds to ``u(z)`` once
        the recovered constants have absorbed its value (and, for the double
        kind, its slope) at the recovery point ``z_r``."""
        z = complex(z)
        a = self.series.coeffs
        zr = self.recovery_point
        if self.kind is ExpansionKind.BETA_DOUBLE:
            U, _, _, _ = _beta_double_terms(self.params, self.series, z)
            if zr is None:
                return np.abs(a * U)
            Ur, Vr, _, _ = _beta_double_terms(self.params, self.series, zr)
            return np.abs(a * (U - Ur - (z - zr) * Vr))
        g = _SINGLE_TERMS[self.kind]
        T = g(self.params, self.series, z)[0]
        if zr is None:
            return np.abs(a * T)
        return np.abs(a * (T - g(self.params, self.series, zr)[0]))

    def cancellation(self, z) -> float:
        """``(|C0| + |C1 z| + Σ|a_n T_n|) / |u|``: digits lost to cancellation."""
        z = complex(z)
        u = _evaluate(self, z)[0]
        total = abs(self.c0) + abs(self.c1 * z) + float(np.sum(self.term_magnitudes(z)))
        return math.inf if u == 0 else total / abs(u)

    def converged_at(self, z, tol: float = CONVERGED_TOL) -> bool:
        """The last three tail contributions are below ``tol |u|`` and
        cancellation keeps the rounding error below ``tol`` (condition
        ``<= tol / MACHINE_EPS``)."""
        z = complex(z)
        u = _evaluate(self, z)[0]
        mags = self.tail_contributions(z)
        if not np.all(np.isfinite(mags)) or u == 0:
            return False
        if float(np.max(mags[-3:])) > tol * abs(u):
            return False
        return self.cancellation(z) * MACHINE_EPS <= tol

    def terms_used(self) -> int:
        return self.N + 1

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": self.params.to_dict(),
            "N": self.N,
            "series": self.series.to_dict(),
            "c0": [self.c0.real, self.c0.imag],
            "c1": [self.c1.real, self.c1.imag],
            "radius": self.radius,
            "region": self.region,
            "root_choice": self.root_choice,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _evaluate(sol: ExpansionSolution, z: complex):
    p = sol.params
    if sol.kind is ExpansionKind.BETA_DOUBLE:
        w, w1, _ = sol.series.evaluate(z)
        U, V, K, dlog = _beta_double_terms(p, sol.series, z)
        a = sol.series.coeffs
        u = sol.c0 + sol.c1 * z + complex(np.dot(a, U))
        u1 = sol.c1 + complex(np.dot(a, V))
        u2 = K * w
        return u, u1, u2
    v, v1, _ = sol.series.evaluate(z)
    T, K, dlog = _SINGLE_TERMS[sol.kind](p, sol.series, z)
    u = sol.c0 + complex(np.dot(sol.series.coeffs, T))
    return u, K * v, K * (v1 + dlog * v)


def _default_recovery_point(center: complex, radius: float, p: BcHeunParams) -> complex:
    if center != 0:
        return center * (1 - RECOVERY_FRACTION * min(1.0, radius / abs(center)))
    z0 = p.q / p.alpha
    return complex(RECOVERY_FRACTION * min(radius, abs(z0)), 0.0)


def _with_constants(sol: ExpansionSolution, z_r: complex) -> ExpansionSolution:
    p = sol.params
    u, u1, u2 = _evaluate(sol, z_r)          # c0 = c1 = 0 at this stage
    if sol.kind is ExpansionKind.BETA_DOUBLE:
        v_true = _v_from_derivatives(p, z_r, u2, _third_derivative(sol, z_r))
        c1 = v_true - u1
        u_true = u_from_derivatives(p, z_r, v_true, u2)
        c0 = u_true - c1 * z_r - u
        return _replace(sol, c0=c0, c1=c1, recovery_point=z_r)
    u_true = u_from_derivatives(p, z_r, u1, u2)
    return _replace(sol, c0=u_true - u, recovery_point=z_r)


def _third_derivative(sol: ExpansionSolution, z: complex) -> complex:
    w, w1, _ = sol.series.evaluate(z)
    _, _, K, dlog = _beta_double_terms(sol.params, sol.series, z)
    return K * (w1 + dlog * w)


def _replace(sol, **kw):
    data = {f: getattr(sol, f) for f in sol.__dataclass_fields__}
    data.update(kw)
    return ExpansionSolution(**data)


def _radius(series: FrobeniusSeries, singular_points) -> float:
    d = [abs(s - series.center) for s in singular_points
         if abs(s - series.center) > 1e-12 * max(1.0, abs(series.center))]
    return min(d) if d else math.inf


def _require_alpha_q(p: BcHeunParams):
    if abs(p.alpha) <= PARAM_ZERO:
        raise AlphaZero("expansion needs alpha != 0")
    if abs(p.q) <= PARAM_ZERO:
        raise QZero("expansion needs q != 0")


def _pick_mu(ode, center, mu):
    if mu is None:
        return indicial_exponents(ode, center)[0]
    return complex(mu)


def expand_beta_single(p: BcHeunParams, N: int, *, c0_mode: str = "recover",
                       recovery_point=None) -> ExpansionSolution:
    """Incomplete-Beta expansion about ``z0 = q/α`` with ``μ = 2``.

    ``c0_mode="recover"`` fixes ``C0`` from the equation at ``recovery_point``
    (default ``z0/2``).  ``c0_mode="limit"`` sets ``C0 = 0`` (allowed only for
    ``Re(1-γ) > 0``).  That makes ``u(0) = 0``, which the solution picked by
    the series about ``z0`` does not satisfy in general; it is kept for
    comparison only.
    """
    _require_alpha_q(p)
    if abs(p.epsilon) <= PARAM_ZERO:
        raise EpsilonZero("expand_beta_single needs epsilon != 0")
    if special.is_nonpositive_integer(1 - p.gamma):
        raise BetaParameterPole(f"1-gamma={1 - p.gamma} is a non-positive integer")
    ode = build_local_ode(OdeKind.AUX_V12, p)
    z0 = p.q / p.alpha
    series = frobenius_coeffs(ode, z0, 2, N)
    radius = _radius(series, ode.singular_points)
    sol = ExpansionSolution(ExpansionKind.BETA_SINGLE, p, series, 0j, 0j, radius,
                            f"|z| <= |z0| and |z - z0| < {radius:.6g}", c0_mode=c0_mode)
    if c0_mode == "limit":
        if (1 - p.gamma).real <= 0:
            raise ConditionsNotMet("C0 = 0 needs Re(1 - gamma) > 0")
        return sol
    if c0_mode != "recover":
        raise ParameterError(f"unknown c0_mode {c0_mode!r}")
    z_r = complex(recovery_point) if recovery_point is not None else z0 / 2
    return _with_constants(sol, z_r)


def expand_beta_double(p: BcHeunParams, N: int, root_choice: str = "z1", *,
                       recovery_point=None) -> ExpansionSolution:
    """Double incomplete-Beta expansion about the root ``z1`` (or ``z2``)."""
    _require_alpha_q(p)
    if abs(p.epsilon) <= PARAM_ZERO:
        raise EpsilonZero("expand_beta_double needs epsilon != 0")
    if abs(p.alpha + p.epsilon) <= PARAM_ZERO:
        raise AlphaPlusEpsZero("expand_beta_double needs alpha + epsilon != 0")
    for a in (-p.gamma, 1 - p.gamma):
        if special.is_nonpositive_integer(a):
            raise BetaParameterPole(f"Beta parameter {a} is a non-positive integer")
    s = singular_structure(p)
    choice = str(root_choice).lower()
    if choice not in ("z1", "z2"):
        raise ParameterError(f"root_choice must be z1 or z2, got {root_choice!r}")
    root = s.z1 if choice == "z1" else s.z2
    if abs(root) <= 1e-12 * max(1.0, abs(s.z0)):
        raise RootAtOriginChosen(f"{choice} = 0: the expansion needs a nonzero root")
    ode = build_local_ode(OdeKind.AUX_W23, p)
    mu = indicial_exponents(ode, root)[0]
    series = frobenius_coeffs(ode, root, mu, N)
    radius = _radius(series, ode.singular_points)
    sol = ExpansionSolution(ExpansionKind.BETA_DOUBLE, p, series, 0j, 0j, radius,
                            f"|z - {choice}| < {radius:.6g}", root_choice=choice)
    z_r = complex(recovery_point) if recovery_point is not None \
        else _default_recovery_point(root, radius, p)
    return _with_constants(sol, z_r)


def _expand_gamma(kind, ode_kind, p, N, mu, recovery_point):
    ode = build_local_ode(ode_kind, p)
    mu = _pick_mu(ode, 0j, mu)
    series = frobenius_coeffs(ode, 0j, mu, N)
    for n in range(N + 1):
        sn = mu + n + 1 - p.gamma
        if special.is_nonpositive_integer(sn if kind is ExpansionKind.GAMMA_DELTA else sn / 2):
            raise GammaParameterPole(f"incomplete Gamma parameter pole at n={n}")
    radius = _radius(series, ode.singular_points)
    sol = ExpansionSolution(kind, p, series, 0j, 0j, radius, f"0 < |z| < {radius:.6g}")
    z_r = complex(recovery_point) if recovery_point is not None \
        else _default_recovery_point(0j, radius, p)
    return _with_constants(sol, z_r)


def expand_gamma_delta(p: BcHeunParams, N: int, *, mu=None, recovery_point=None) -> ExpansionSolution:
    """Incomplete-Gamma expansion in ``δz`` about the origin.

    ``mu`` defaults to the exponent with the larger real part; the other
    exponent gives the second solution when it is not logarithmic.
    """
    _require_alpha_q(p)
    if abs(p.delta) <= PARAM_ZERO:
        raise DeltaZero("expand_gamma_delta needs delta != 0")
    return _expand_gamma(ExpansionKind.GAMMA_DELTA, OdeKind.AUX_GAMMA34, p, N, mu, recovery_point)


def expand_gamma_eps(p: BcHeunParams, N: int, *, mu=None, recovery_point=None) -> ExpansionSolution:
    """Incomplete-Gamma expansion in ``εz²/2`` about the origin."""
    _require_alpha_q(p)
    if abs(p.epsilon) <= PARAM_ZERO:
        raise EpsilonZero("expand_gamma_eps needs epsilon != 0")
    return _expand_gamma(ExpansionKind.GAMMA_EPS, OdeKind.AUX_GAMMA38, p, N, mu, recovery_point)


EXPANDERS = {
    ExpansionKind.BETA_SINGLE: expand_beta_single,
    ExpansionKind.BETA_DOUBLE: expand_beta_double,
    ExpansionKind.GAMMA_DELTA: expand_gamma_delta,
    ExpansionKind.GAMMA_EPS: expand_gamma_eps,
}


def expand(kind, p: BcHeunParams, N: int, **kw) -> ExpansionSolution:
    return EXPANDERS[ExpansionKind(kind)](p, N, **kw)


# ---------------------------------------------------------------------------
# termination


TAIL_TOL = 1e-10
GLOBAL_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class TerminationCertificate:
    N: int
    mu: complex
    params: BcHeunParams
    tail_norms: tuple
    p_n: float
    global_residual: float

    @property
    def ok(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {
            "status": "terminating",
            "N": self.N,
            "mu": [self.mu.real, self.mu.imag],
            "params": self.params.to_dict(),
            "tail_norms": list(self.tail_norms),
            "p_n": self.p_n,
            "global_residual": self.global_residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class NotTerminating:
    N: int
    mu: complex
    params: BcHeunParams
    tail_norms: tuple
    p_n: float
    global_residual: float | None
    reason: str

    @property
    def ok(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {
            "status": "not_terminating",
            "N": self.N,
            "mu": [self.mu.real, self.mu.imag],
            "params": self.params.to_dict(),
            "tail_norms": list(self.tail_norms),
            "p_n": self.p_n,
            "global_residual": self.global_residual,
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def ring_points(radius: float, k: int = 16) -> list:
    """``k`` points on ``|z| = radius`` staggered off the negative real axis."""
    return [radius * cmath.exp(1j * math.pi * (2 * j + 1) / k - 1j * math.pi) for j in range(k)]


def _termination_series(p, kind, N, extra):
    kind = ExpansionKind(kind)
    if kind is ExpansionKind.BETA_SINGLE:
        ode = build_local_ode(OdeKind.AUX_V12, p)
        center, mu = p.q / p.alpha, 2
    elif kind is ExpansionKind.BETA_DOUBLE:
        ode = build_local_ode(OdeKind.AUX_W23, p)
        center = singular_structure(p).z1
        mu = indicial_exponents(ode, center)[0]
    else:
        raise ParameterError("termination is defined for the Beta expansions")
    return ode, center, frobenius_coeffs(ode, center, mu, N + extra)


def check_termination(p: BcHeunParams, kind, N: int):
    """Certify that the series of a Beta expansion stops after ``a_N``.

    Returns a :class:`TerminationCertificate` or a :class:`NotTerminating`
    report carrying the offending tail.
    """
    kind = ExpansionKind(kind)
    _require_alpha_q(p)
    ode, center, full = _termination_series(p, kind, N, 3)
    a = full.coeffs
    top = float(np.max(np.abs(a[: N + 1])))
    tails = tuple(float(abs(a[N + j]) / top) for j in (1, 2, 3))
    width = full.band
    # coefficient linking a_N to a_(N+width-1): vanishes with the series
    band = synthesize_recurrence(ode, center, full.mu, N + width - 1)
    lead = abs(band.coef(0))
    p_n = float(abs(band.coef(width - 1)) / max(lead, 1e-300))
    need = 2 if width <= 4 else 3
    bad = [t for t in tails[:need] if t > TAIL_TOL]
    if bad or p_n > TAIL_TOL:
        why = "P_N != 0" if p_n > TAIL_TOL else "trailing coefficients do not vanish"
        return NotTerminating(N, full.mu, p, tails, p_n, None, why)
    finite = FrobeniusSeries(full.center, full.mu, a[: N + 1].copy(), full.band)
    sol = ExpansionSolution(kind, p, finite, 0j, 0j, math.inf, "finite sum")
    pts = ring_points(0.5 * abs(p.q / p.alpha))
    z_r = pts[len(pts) // 2 - 1]
    sol = _with_constants(sol, z_r)
    worst = float(max(sol.residual(z, allow_outside=True) for z in pts))
    if worst > GLOBAL_RESIDUAL_TOL:
        return NotTerminating(N, full.mu, p, tails, p_n, worst,
                              "finite sum fails the global residual check")
    return TerminationCertificate(N, full.mu, p, tails, p_n, worst)


def _tail_pair(gamma, epsilon, alpha, N, q, delta):
    p = BcHeunParams(gamma, delta, epsilon, alpha, q)
    ode = build_local_ode(OdeKind.AUX_V12, p)
    z0 = q / alpha
    s = frobenius_coeffs(ode, z0, 2, N + 2)
    # scale-free form: a_n z0^n
    return np.array([s.coeffs[N + 1] * z0 ** (N + 1), s.coeffs[N + 2] * z0 ** (N + 2)])


def find_terminating_params(gamma, epsilon, N: int, seed_q, seed_delta, *,
                            max_iter: int = 100, tol: float = 1e-14,
                            imag_nudge: float = 1e-2) -> BcHeunParams:
    """Newton search for (q, δ) making the single-Beta series a finite sum.

    α is fixed by ``α = -ε(N + μ + 1 - γ)`` with ``μ = 2``; the unknowns
    solve ``a_(N+1) = a_(N+2) = 0`` in the scale-free form ``a_n z0^n``.

    With real γ, ε and real seeds the iteration would stay on the real axis,
    where the system often has no root at all; the seeds then get an
    imaginary part of ``imag_nudge`` times their size.  Raises
    :class:`NoRoot` on failure.
    """
    gamma, epsilon = complex(gamma), complex(epsilon)
    if abs(epsilon) <= PARAM_ZERO:
        raise EpsilonZero("termination search needs epsilon != 0")
    if N < 1:
        raise ParameterError("N must be at least 1")
    alpha = -epsilon * (N + 3 - gamma)
    x = np.array([complex(seed_q), complex(seed_delta)])
    if all(abs(v.imag) == 0 for v in (gamma, epsilon, *x)):
        x = x + 1j * imag_nudge * np.maximum(np.abs(x), 1.0)

    def F(v):
        if abs(v[0]) <= PARAM_ZERO:
            raise NoRoot("Newton iterate reached q = 0")
        return _tail_pair(gamma, epsilon, alpha, N, v[0], v[1])

    try:
        f = F(x)
        for _ in range(max_iter):
            norm = float(np.linalg.norm(f))
            if norm <= tol:
                break
            J = np.empty((2, 2), dtype=complex)
            for j in range(2):
                h = 1e-7 * max(abs(x[j]), 1.0)
                xp = x.copy()
                xp[j] += h
                J[:, j] = (F(xp) - f) / h
            if not np.all(np.isfinite(J)) or abs(np.linalg.det(J)) == 0:
                raise NoRoot("singular Jacobian")
            step = np.linalg.solve(J, -f)
            t = 1.0
            while True:
                trial = x + t * step
                ft = F(trial)
                if np.linalg.norm(ft) < norm or t < 1e-10:
                    break
                t /= 2
            x, f = trial, ft
            if float(np.linalg.norm(t * step)) <= 1e-15 * max(1.0, float(np.linalg.norm(x))):
                break
    except (ParameterError, PoleAtParameter, FloatingPointError) as exc:
        raise NoRoot(f"Newton iteration failed: {exc}") from exc
    p = BcHeunParams(gamma, x[1], epsilon, alpha, x[0])
    cert = check_termination(p, ExpansionKind.BETA_SINGLE, N)
    if not isinstance(cert, TerminationCertificate):
        raise NoRoot(f"no terminating parameters found near the seeds ({cert.reason})")
    return p


# ---------------------------------------------------------------------------
# quadrature solution


SPECIAL_TOL = 1e-10


def quadrature_conditions(p: BcHeunParams) -> tuple[float, float]:
    """Relative sizes of ``α + ε`` and ``q² - δq - αγ``."""
    c1 = abs(p.alpha + p.epsilon) / max(abs(p.alpha) + abs(p.epsilon), 1e-300)
    c2 = abs(p.q ** 2 - p.delta * p.q - p.alpha * p.gamma) / max(
        abs(p.q) ** 2 + abs(p.delta * p.q) + abs(p.alpha * p.gamma), 1e-300)
    return c1, c2


def special_params(gamma, delta, epsilon, branch: int = 1) -> BcHeunParams:
    """Parameters with ``α = -ε`` and ``q`` a root of ``q² - δq - αγ = 0``."""
    gamma, delta, epsilon = complex(gamma), complex(delta), complex(epsilon)
    alpha = -epsilon
    r = cmath.sqrt(delta * delta + 4 * alpha * gamma)
    q = (delta + r) / 2 if branch >= 0 else (delta - r) / 2
    return BcHeunParams(gamma, delta, epsilon, alpha, q)


def quadrature_special(p: BcHeunParams, z, c1=1.0, c2=0.0, *, z_b=None, derivatives: bool = False):
    """Solution in quadratures when ``α + ε = 0`` and ``q² - δq - αγ = 0``:

        u = C1 E + h (C2 + C1 J),  E = e^(-δz-εz²/2) z^(-γ),
        h = (γ + δz + εz²)/(αz - q),  J = ∫_(z_b)^z E(t) (αt - q)/t dt.

    ``z_b`` defaults to ``z0/2``; the path is a straight segment that must not
    cross the cut (-∞, 0].
    """
    c_a, c_b = quadrature_conditions(p)
    if c_a > SPECIAL_TOL or c_b > SPECIAL_TOL:
        raise ConditionsNotMet("needs alpha + epsilon = 0 and q^2 - delta q - alpha gamma = 0")
    _require_alpha_q(p)
    z = complex(z)
    if z == 0:
        raise OriginSingular("quadrature_special is undefined at z = 0")
    z0 = p.q / p.alpha
    if abs(z - z0) <= 1e-14 * max(1.0, abs(z0)):
        raise AtExtraSingularity("z coincides with z0")
    z_b = z0 / 2 if z_b is None else complex(z_b)
    if crosses_branch_cut(z_b, z):
        raise ParameterError("quadrature path must avoid the cut (-inf, 0]")
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q
    c1, c2 = complex(c1), complex(c2)

    def E(t):
        return cmath.exp(-d * t - e * t * t / 2 - g * cmath.log(t))

    J = _path_quad(lambda t: E(t) * (a * t - q) / t, z_b, z) if c1 != 0 else 0j
    P = g + d * z + e * z * z
    L = a * z - q
    h = P / L
    Ez = E(z)
    u = c1 * Ez + h * (c2 + c1 * J)
    if not derivatives:
        return u
    gz = -d - e * z - g / z
    dE = Ez * gz
    d2E = Ez * (gz * gz - e + g / (z * z))
    dP, d2P = d + 2 * e * z, 2 * e
    dh = (dP * L - P * a) / (L * L)
    d2h = (d2P * L * L - 2 * a * L * dP + 2 * a * a * P) / L ** 3
    dJ = Ez * L / z
    d2J = dE * L / z + Ez * a / z - Ez * L / (z * z)
    du = c1 * dE + dh * (c2 + c1 * J) + h * c1 * dJ
    d2u = c1 * d2E + d2h * (c2 + c1 * J) + 2 * dh * c1 * dJ + h * c1 * d2J
    return u, du, d2u


__all__ = [
    "EXPANDERS",
    "ExpansionKind",
    "ExpansionSolution",
    "NotTerminating",
    "TerminationCertificate",
    "VKind",
    "check_termination",
    "expand",
    "expand_beta_double",
    "expand_beta_single",
    "expand_gamma_delta",
    "expand_gamma_eps",
    "find_terminating_params",
    "quadrature_conditions",
    "quadrature_special",
    "recover_u_from_v",
    "recover_v_from_w",
    "ring_points",
    "special_params",
    "term_derivative_error",
    "u_from_derivatives",
]
