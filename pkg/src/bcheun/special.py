"""Complex-argument special functions used by the expansions and oracles.

Everything here works in double precision on Python ``complex`` scalars and
uses the principal branch ``x**a = exp(a*log(x))`` with the cut along the
negative real axis.  Series routines return a :class:`SpecialFnResult` so
callers can see how many terms were spent and whether the tolerance was met.

The default stopping rule is a relative tolerance of ``1e-15`` with at most
``10_000`` terms; the latter can be overridden process-wide through the
``BCHEUN_MAX_TERMS`` environment variable.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import DivergentSeries, IntegerBNotSupported, ParameterError, PoleAtParameter

DEFAULT_TOL = 1e-15
DEFAULT_MAX_TERMS = 10_000

# relative distance to an integer below which a parameter counts as a pole
_POLE_EPS = 1e-12


def default_max_terms() -> int:
    env = os.environ.get("BCHEUN_MAX_TERMS")
    if env:
        return int(env)
    return DEFAULT_MAX_TERMS


@dataclass(frozen=True)
class SpecialFnResult:
    value: complex
    terms_used: int
    converged: bool


def is_nonpositive_integer(z: complex, eps: float = _POLE_EPS) -> bool:
    z = complex(z)
    if abs(z.imag) > eps * max(1.0, abs(z.real)):
        return False
    n = round(z.real)
    return n <= 0 and abs(z.real - n) <= eps * max(1.0, abs(z.real))


def is_integer(z: complex, eps: float = _POLE_EPS) -> bool:
    z = complex(z)
    return (abs(z.imag) <= eps * max(1.0, abs(z.real))
            and abs(z.real - round(z.real)) <= eps * max(1.0, abs(z.real)))


def cpow(x: complex, a: complex) -> complex:
    """Principal power ``x**a``; ``0**a`` is 0 for ``Re a > 0``."""
    x = complex(x)
    a = complex(a)
    if x == 0:
        if a == 0:
            return 1.0 + 0j
        if a.real > 0:
            return 0j
        raise ParameterError(f"0**{a} is undefined")
    return cmath.exp(a * cmath.log(x))


# ---------------------------------------------------------------------------
# Gamma function family


def log_gamma(z: complex) -> complex:
    """Principal-branch log-gamma (the analytic continuation of log Γ)."""
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleAtParameter(f"log_gamma has a pole at z={z}")
    return complex(_sp.loggamma(z))


def gamma_fn(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def rgamma(z: complex) -> complex:
    """1/Γ(z), entire; exactly zero at the non-positive integers."""
    if is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def beta_complete(a: complex, b: complex) -> complex:
    """Complete Beta function Γ(a)Γ(b)/Γ(a+b)."""
    for name, val in (("a", a), ("b", b)):
        if is_nonpositive_integer(val):
            raise PoleAtParameter(f"complete Beta has a pole at {name}={val}")
    return cmath.exp(log_gamma(a) + log_gamma(b)) * rgamma(complex(a) + complex(b))


# ---------------------------------------------------------------------------
# Series helpers


def _sum_ratio_series(ratio, x: complex, tol: float, max_terms: int):
    """Sum ``Σ t_k`` with ``t_0 = 1`` and ``t_{k+1} = t_k * ratio(k) * x``.

    Stops once two consecutive terms fall below ``tol * |sum|`` or a term is
    exactly zero (terminating series).  Returns (sum, terms_used, converged).
    """
    total = 1.0 + 0j
    term = 1.0 + 0j
    small = 0
    for k in range(max_terms):
        term = term * ratio(k) * x
        total += term
        if term == 0:
            return total, k + 2, True
        if abs(term) <= tol * abs(total):
            small += 1
            if small >= 2:
                return total, k + 2, True
        else:
            small = 0
    return total, max_terms + 1, False


def _check_result(res: SpecialFnResult, what: str) -> SpecialFnResult:
    if not res.converged:
        raise DivergentSeries(f"{what} did not converge in {res.terms_used} terms")
    return res


# ---------------------------------------------------------------------------
# Incomplete Beta


def _inc_beta_direct(a, b, x, tol, max_terms):
    # B(a,b;x) = x^a/a * 2F1(a, 1-b; a+1; x)
    s, n, ok = _sum_ratio_series(
        lambda k: (a + k) * (1 - b + k) / ((a + 1 + k) * (k + 1)), x, tol, max_terms)
    return cpow(x, a) / a * s, n, ok


def inc_beta(a: complex, b: complex, x: complex, *, tol: float = DEFAULT_TOL,
             max_terms: int | None = None) -> SpecialFnResult:
    """Incomplete Beta function ``B(a,b;x) = ∫_0^x t^(a-1) (1-t)^(b-1) dt``.

    Evaluated through the Gauss series ``x^a/a * 2F1(a, 1-b; a+1; x)``.  When
    ``x`` is closer to 1 than to 0 the reflection
    ``B(a,b;x) = B(a,b) - B(b,a;1-x)`` is used instead; at ``x = 1`` the
    complete Beta function is returned.

    Raises :class:`PoleAtParameter` for ``a`` in {0, -1, -2, ...} and
    :class:`DivergentSeries` if the chosen series fails to converge.
    """
    a, b, x = complex(a), complex(b), complex(x)
    max_terms = default_max_terms() if max_terms is None else max_terms
    if is_nonpositive_integer(a):
        raise PoleAtParameter(f"inc_beta: a={a} is a non-positive integer")
    if x == 0:
        if a.real <= 0:
            raise ParameterError("inc_beta(x=0) diverges for Re(a) <= 0")
        return SpecialFnResult(0j, 0, True)
    if x == 1:
        if b.real <= 0:
            raise DivergentSeries("complete Beta integral diverges for Re(b) <= 0")
        return SpecialFnResult(beta_complete(a, b), 0, True)

    y = 1 - x
    if abs(y) < abs(x) and abs(y) < 1 and not is_nonpositive_integer(b):
        val, n, ok = _inc_beta_direct(b, a, y, tol, max_terms)
        res = SpecialFnResult(beta_complete(a, b) - val, n, ok)
    else:
        if abs(x) > 1:
            raise DivergentSeries(f"inc_beta: no convergent route for x={x}")
        val, n, ok = _inc_beta_direct(a, b, x, tol, max_terms)
        res = SpecialFnResult(val, n, ok)
    return _check_result(res, "inc_beta")


def inc_beta_sequence(a: complex, x: complex, m_max: int) -> np.ndarray:
    """``B(a, 1+m; x)`` for ``m = 0..m_max`` by upward recurrence in ``m``.

    Uses ``B(a, m+1; x) = m/(a+m) B(a, m; x) + x^a (1-x)^m / (a+m)`` starting
    from ``B(a, 1; x) = x^a / a``.  The homogeneous factor ``m/(a+m)`` tends to
    one, so relative errors do not grow; this avoids the cancellation the Gauss
    series suffers for large integer ``b``.
    """
    a, x = complex(a), complex(x)
    if is_nonpositive_integer(a):
        raise PoleAtParameter(f"inc_beta_sequence: a={a} is a non-positive integer")
    out = np.empty(m_max + 1, dtype=complex)
    xa = cpow(x, a)
    out[0] = xa / a
    one_minus = 1 - x
    pw = 1.0 + 0j
    for m in range(1, m_max + 1):
        pw *= one_minus
        out[m] = (m * out[m - 1] + xa * pw) / (a + m)
    return out


# ---------------------------------------------------------------------------
# Incomplete Gamma


def _lower_gamma_series(s, x, tol, max_terms):
    # γ(s,x) = x^s e^{-x} Σ x^k / (s (s+1) ... (s+k))
    total, n, ok = _sum_ratio_series(lambda k: 1.0 / (s + k + 1), x, tol, max_terms)
    return cpow(x, s) * cmath.exp(-x) / s * total, n, ok


def _upper_gamma_cf(s, x, tol, max_terms):
    # Legendre continued fraction, modified Lentz evaluation
    tiny = 1e-300
    b = x + 1 - s
    c = 1 / tiny
    d = 1 / b if b != 0 else 1 / tiny
    h = d
    for i in range(1, max_terms + 1):
        an = -i * (i - s)
        b = b + 2
        d = an * d + b
        if d == 0:
            d = tiny
        c = b + an / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        h *= delta
        if abs(delta - 1) <= tol:
            return cpow(x, s) * cmath.exp(-x) * h, i, True
    return cpow(x, s) * cmath.exp(-x) * h, max_terms, False


def _direct_gamma_series(s, x, tol, max_terms):
    # γ(s,x) = x^s Σ (-x)^k / (k! (s+k)); no cancellation for Re x < 0
    term = 1.0 + 0j
    total = 1 / s
    for k in range(1, max_terms + 1):
        term *= -x / k
        add = term / (s + k)
        total += add
        if abs(add) <= tol * abs(total) and k > abs(x):
            return cpow(x, s) * total, k, True
    return cpow(x, s) * total, max_terms, False


def _gamma_route(s: complex, x: complex) -> str:
    """'cf' (continued fraction for Γ), 'kummer' or 'direct' (series for γ)."""
    if abs(x) > abs(s) + 4 and abs(cmath.phase(x)) < 0.75 * math.pi:
        return "cf"
    return "direct" if x.real < 0 else "kummer"


def _lower_by_series(s, x, tol, max_terms):
    if _gamma_route(s, x) == "direct":
        return _direct_gamma_series(s, x, tol, max_terms)
    return _lower_gamma_series(s, x, tol, max_terms)


def inc_gamma_lower(s: complex, x: complex, *, tol: float = DEFAULT_TOL,
                    max_terms: int | None = None) -> SpecialFnResult:
    """Lower incomplete Gamma ``γ(s,x) = ∫_0^x t^(s-1) e^(-t) dt``."""
    s, x = complex(s), complex(x)
    max_terms = default_max_terms() if max_terms is None else max_terms
    if is_nonpositive_integer(s):
        raise PoleAtParameter(f"inc_gamma_lower: s={s} is a non-positive integer")
    if x == 0:
        if s.real <= 0:
            raise ParameterError("γ(s,0) diverges for Re(s) <= 0")
        return SpecialFnResult(0j, 0, True)
    if _gamma_route(s, x) != "cf":
        val, n, ok = _lower_by_series(s, x, tol, max_terms)
        return _check_result(SpecialFnResult(val, n, ok), "inc_gamma_lower")
    val, n, ok = _upper_gamma_cf(s, x, tol, max_terms)
    return _check_result(SpecialFnResult(gamma_fn(s) - val, n, ok), "inc_gamma_lower")


def inc_gamma_upper(s: complex, x: complex, *, tol: float = DEFAULT_TOL,
                    max_terms: int | None = None) -> SpecialFnResult:
    """Upper incomplete Gamma ``Γ(s;x) = ∫_x^∞ t^(s-1) e^(-t) dt``.

    For ``|x| > |s| + 4`` away from the negative real axis the Legendre
    continued fraction is used; otherwise the lower function is summed as a
    power series (the form without cancellation for the sign of ``Re x``)
    and subtracted from Γ(s).
    """
    s, x = complex(s), complex(x)
    max_terms = default_max_terms() if max_terms is None else max_terms
    if x == 0:
        if s.real <= 0:
            raise ParameterError("Γ(s;0) diverges for Re(s) <= 0")
        return SpecialFnResult(gamma_fn(s), 0, True)
    if _gamma_route(s, x) != "cf":
        if is_nonpositive_integer(s):
            raise PoleAtParameter(f"inc_gamma_upper: s={s} excluded on the series route")
        val, n, ok = _lower_by_series(s, x, tol, max_terms)
        return _check_result(SpecialFnResult(gamma_fn(s) - val, n, ok), "inc_gamma_upper")
    val, n, ok = _upper_gamma_cf(s, x, tol, max_terms)
    return _check_result(SpecialFnResult(val, n, ok), "inc_gamma_upper")


# ---------------------------------------------------------------------------
# Confluent hypergeometric functions


def _kummer_taylor(a, b, x, tol, max_terms):
    return _sum_ratio_series(lambda k: (a + k) / ((b + k) * (k + 1)), x, tol, max_terms)


def kummer_1f1(a: complex, b: complex, x: complex, *, tol: float = DEFAULT_TOL,
               max_terms: int | None = None) -> SpecialFnResult:
    """Kummer's function ``1F1(a; b; x) = Σ (a)_n/(b)_n x^n/n!``.

    For ``Re x < 0`` the series is summed after Kummer's transformation
    ``1F1(a;b;x) = e^x 1F1(b-a; b; -x)``, which keeps the terms of one sign
    for real arguments.
    """
    a, b, x = complex(a), complex(b), complex(x)
    max_terms = default_max_terms() if max_terms is None else max_terms
    if is_nonpositive_integer(b):
        raise PoleAtParameter(f"kummer_1f1: b={b} is a non-positive integer")
    if x == 0:
        return SpecialFnResult(1.0 + 0j, 1, True)
    if x.real < 0 and not is_nonpositive_integer(a):
        s, n, ok = _kummer_taylor(b - a, b, -x, tol, max_terms)
        s = cmath.exp(x) * s
    else:
        s, n, ok = _kummer_taylor(a, b, x, tol, max_terms)
    return _check_result(SpecialFnResult(s, n, ok), "kummer_1f1")


def tricomi_u(a: complex, b: complex, x: complex, *, tol: float = DEFAULT_TOL,
              max_terms: int | None = None) -> SpecialFnResult:
    """Tricomi's function U(a, b, x) from the Kummer connection formula.

    Only non-integer ``b`` is supported; the integer case needs the
    logarithmic limit.
    """
    a, b, x = complex(a), complex(b), complex(x)
    if is_integer(b):
        raise IntegerBNotSupported(f"tricomi_u: integer b={b} not supported")
    if x == 0:
        raise ParameterError("tricomi_u: x must be nonzero")
    m1 = kummer_1f1(a, b, x, tol=tol, max_terms=max_terms)
    m2 = kummer_1f1(a - b + 1, 2 - b, x, tol=tol, max_terms=max_terms)
    g1 = gamma_fn(1 - b) * rgamma(a - b + 1)
    g2 = gamma_fn(b - 1) * rgamma(a)
    val = g1 * m1.value + g2 * cpow(x, 1 - b) * m2.value
    return SpecialFnResult(val, m1.terms_used + m2.terms_used, True)


__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_MAX_TERMS",
    "SpecialFnResult",
    "beta_complete",
    "cpow",
    "default_max_terms",
    "gamma_fn",
    "inc_beta",
    "inc_beta_sequence",
    "inc_gamma_lower",
    "inc_gamma_upper",
    "is_integer",
    "is_nonpositive_integer",
    "kummer_1f1",
    "log_gamma",
    "rgamma",
    "tricomi_u",
]

