"""Polynomial-coefficient ODEs, indicial exponents and Frobenius recurrences.

Each of the equations handled by the library is stored as

    A(z) v'' + B(z) v' + C(z) v = 0

with polynomial A, B, C (ascending coefficient arrays).  The auxiliary
equations are not typed in by hand: they are derived from the biconfluent
Heun operator by two mechanical moves, differentiation (``y = v'``) and a
gauge change (``y = φ w`` with ``φ'/φ = g0(z) + g1/z``), followed by
division by the common factors that the derivation introduces.

Recurrences are synthesized numerically.  After shifting A, B, C to the
expansion point, substituting ``Σ a_j h^(j+μ)`` gives

    Σ_d  T_d(n) a_(n-d) = 0,   T_d(n) = A_(k+d) m(m-1) + B_(k-1+d) m + C_(k-2+d)

with ``m = n - d + μ`` and ``k`` the order of the zero of A at the point.
"""

from __future__ import annotations

import cmath
import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import IrregularPoint, LogarithmicCase, ParameterError, UnsupportedParameters
from .model import PARAM_ZERO, BcHeunParams


class OdeKind(str, enum.Enum):
    BHE = "BHE"
    AUX_V12 = "AUX_V12"
    AUX_V22 = "AUX_V22"
    AUX_W23 = "AUX_W23"
    AUX_GAMMA34 = "AUX_GAMMA34"
    AUX_GAMMA38 = "AUX_GAMMA38"


# ---------------------------------------------------------------------------
# polynomial helpers (ascending coefficients)


def _arr(c) -> np.ndarray:
    return np.atleast_1d(np.asarray(c, dtype=complex))


def poly_add(*ps) -> np.ndarray:
    n = max(len(p) for p in ps)
    out = np.zeros(n, dtype=complex)
    for p in ps:
        out[: len(p)] += p
    return out


def poly_mul(p, q) -> np.ndarray:
    return np.convolve(_arr(p), _arr(q))


def poly_deriv(p) -> np.ndarray:
    p = _arr(p)
    if len(p) == 1:
        return np.zeros(1, dtype=complex)
    return p[1:] * np.arange(1, len(p))


def poly_eval(p, z) -> complex:
    acc = 0j
    for c in reversed(_arr(p)):
        acc = acc * z + c
    return acc


def poly_trim(p, rel: float = 0.0) -> np.ndarray:
    p = _arr(p)
    scale = np.max(np.abs(p)) if len(p) else 0.0
    n = len(p)
    while n > 1 and abs(p[n - 1]) <= rel * scale:
        n -= 1
    return p[:n].copy()


def taylor_shift(p, c) -> np.ndarray:
    """Coefficients of ``p(c + h)`` in powers of ``h`` (repeated Horner)."""
    a = _arr(p).copy()
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def _divide_linear(p, root, what: str) -> np.ndarray:
    """Exact division by ``(z - root)``; the remainder must vanish."""
    p = _arr(p)
    if len(p) == 1:
        if abs(p[0]) > 1e-9 * max(1.0, abs(p[0])):
            raise ParameterError(f"{what}: constant not divisible by (z - {root})")
        return np.zeros(1, dtype=complex)
    q = np.zeros(len(p) - 1, dtype=complex)
    acc = 0j
    for i in range(len(p) - 1, 0, -1):
        acc = acc * root + p[i]
        q[i - 1] = acc
    rem = acc * root + p[0]
    scale = np.max(np.abs(p)) * max(1.0, abs(root)) ** len(p)
    if abs(rem) > 1e-8 * scale:
        raise ParameterError(f"{what}: nonzero remainder {abs(rem):.3e} dividing by (z - {root})")
    return q


# ---------------------------------------------------------------------------
# LocalOde


@dataclass(frozen=True)
class LocalOde:
    """``A v'' + B v' + C v = 0`` with ascending polynomial coefficients."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    singular_points: tuple = ()
    kind: OdeKind | None = None

    def __post_init__(self):
        A = poly_trim(self.A)
        if np.all(A == 0):
            raise ParameterError("A must not vanish identically")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _arr(self.B))
        object.__setattr__(self, "C", _arr(self.C))
        if not self.singular_points:
            roots = np.roots(A[::-1]) if len(A) > 1 else []
            object.__setattr__(self, "singular_points", tuple(complex(r) for r in roots))

    def coefficients_at(self, z) -> tuple[complex, complex, complex]:
        return poly_eval(self.A, z), poly_eval(self.B, z), poly_eval(self.C, z)

    def apply(self, z, v, v1, v2) -> complex:
        a, b, c = self.coefficients_at(z)
        return a * v2 + b * v1 + c * v


def _derivative_transform(A, B, C):
    # v = -(A y' + B y)/C, differentiate once and clear C
    A, B, C = _arr(A), _arr(B), _arr(C)
    dA, dB, dC = poly_deriv(A), poly_deriv(B), poly_deriv(C)
    A2 = poly_mul(C, A)
    B2 = poly_add(poly_mul(C, dA), poly_mul(C, B), -poly_mul(dC, A))
    C2 = poly_add(poly_mul(C, dB), -poly_mul(dC, B), poly_mul(C, C))
    return A2, B2, C2


def _gauge_transform(A, B, C, g0, g1):
    # y = φ w with φ'/φ = g0(z) + g1/z; the result is multiplied by z^2
    A, B, C = _arr(A), _arr(B), _arr(C)
    g0 = _arr(g0)
    z = np.array([0, 1], dtype=complex)
    z2 = np.array([0, 0, 1], dtype=complex)
    zg = poly_add(poly_mul(z, g0), [g1])                    # z g
    z2dg = poly_add(poly_mul(z2, poly_deriv(g0)), [-g1])    # z^2 g'
    A2 = poly_mul(z2, A)
    B2 = poly_add(2 * poly_mul(poly_mul(zg, z), A), poly_mul(z2, B))
    C2 = poly_add(poly_mul(poly_add(z2dg, poly_mul(zg, zg)), A),
                  poly_mul(poly_mul(z, zg), B),
                  poly_mul(z2, C))
    return A2, B2, C2


def _divide_all(polys, root, what):
    return tuple(_divide_linear(p, root, what) for p in polys)


def _monic(A, B, C):
    A = poly_trim(A, 1e-14)
    lead = A[-1]
    return A / lead, poly_trim(_arr(B) / lead, 1e-14), poly_trim(_arr(C) / lead, 1e-14)


def _bhe_polys(p: BcHeunParams):
    return (np.array([0, 1], dtype=complex),
            np.array([p.gamma, p.delta, p.epsilon], dtype=complex),
            np.array([-p.q, p.alpha], dtype=complex))


def build_local_ode(kind: OdeKind | str, p: BcHeunParams) -> LocalOde:
    """Polynomial form of the requested equation.

    ``BHE`` is the Heun operator multiplied by z.  The auxiliary kinds are the
    equations satisfied by

    * ``AUX_V12``: ``v = z^γ u'``
    * ``AUX_V22``: ``v = u'``
    * ``AUX_W23``: ``w = z^(1+γ) u''``
    * ``AUX_GAMMA34``: ``v = e^(δz) z^γ u'``
    * ``AUX_GAMMA38``: ``v = e^(εz²/2) z^γ u'``

    and are normalized so that A is monic.
    """
    kind = OdeKind(kind)
    A, B, C = _bhe_polys(p)
    if kind is OdeKind.BHE:
        return LocalOde(A, B, C, (0j,), kind)

    if abs(p.alpha) <= PARAM_ZERO or abs(p.q) <= PARAM_ZERO:
        raise UnsupportedParameters(f"{kind.value} needs alpha != 0 and q != 0")
    z0 = p.q / p.alpha
    A, B, C = _derivative_transform(A, B, C)   # equation for u'

    if kind is OdeKind.AUX_V22:
        return LocalOde(*_monic(A, B, C), (0j, z0), kind)

    if kind is OdeKind.AUX_W23:
        if abs(p.alpha + p.epsilon) <= PARAM_ZERO:
            raise UnsupportedParameters("AUX_W23 needs alpha + epsilon != 0")
        A, B, C = _derivative_transform(A, B, C)           # equation for u''
        A, B, C = _gauge_transform(A, B, C, [0], -(1 + p.gamma))
        A, B, C = _divide_all((A, B, C), 0j, kind.value)
        A, B, C = _divide_all((A, B, C), 0j, kind.value)
        A, B, C = _divide_all((A, B, C), z0, kind.value)
        s = model.singular_structure(p)
        pts = (0j, s.z1) if s.degenerate else (0j, s.z1, s.z2)
        return LocalOde(*_monic(A, B, C), pts, kind)

    if kind is OdeKind.AUX_V12:
        g0 = [0]
    elif kind is OdeKind.AUX_GAMMA34:
        g0 = [-p.delta]
    else:
        g0 = [0, -p.epsilon]
    A, B, C = _gauge_transform(A, B, C, g0, -p.gamma)
    A, B, C = _divide_all((A, B, C), 0j, kind.value)
    A, B, C = _divide_all((A, B, C), 0j, kind.value)
    return LocalOde(*_monic(A, B, C), (0j, z0), kind)


# ---------------------------------------------------------------------------
# Local analysis


@dataclass(frozen=True)
class _Shifted:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    k: int

    def coef(self, arr, i):
        return arr[i] if 0 <= i < len(arr) else 0j

    def slot(self, d: int, m) -> complex:
        return (self.coef(self.A, self.k + d) * m * (m - 1)
                + self.coef(self.B, self.k - 1 + d) * m
                + self.coef(self.C, self.k - 2 + d))

    @property
    def width(self) -> int:
        top = max(len(self.A) - 1 - self.k, len(self.B) - self.k, len(self.C) + 1 - self.k)
        return top + 1


_ZERO_REL = 1e-11


def _shift(ode: LocalOde, center) -> _Shifted:
    center = complex(center)
    A = taylor_shift(ode.A, center)
    B = taylor_shift(ode.B, center)
    C = taylor_shift(ode.C, center)
    scale = max(np.max(np.abs(A)), 1e-300)
    k = 0
    while k < len(A) and abs(A[k]) <= _ZERO_REL * scale:
        A[k] = 0
        k += 1
    bscale = max(np.max(np.abs(B)), scale)
    cscale = max(np.max(np.abs(C)), scale)
    for i in range(min(k, len(B))):
        if abs(B[i]) <= _ZERO_REL * bscale:
            B[i] = 0
    for i in range(min(k, len(C))):
        if abs(C[i]) <= _ZERO_REL * cscale:
            C[i] = 0
    if k > 2 or any(B[i] != 0 for i in range(min(k - 1, len(B)))) \
            or any(C[i] != 0 for i in range(min(k - 2, len(C)))):
        raise IrregularPoint(f"z={center} is not a regular singular point")
    return _Shifted(A, B, C, k)


def indicial_exponents(ode: LocalOde, center) -> tuple[complex, complex]:
    """Roots of the indicial equation at ``center``, larger real part first.

    An ordinary point gives (1, 0).
    """
    sh = _shift(ode, center)
    a = sh.coef(sh.A, sh.k)
    b = sh.coef(sh.B, sh.k - 1) - a
    c = sh.coef(sh.C, sh.k - 2)
    disc = cmath.sqrt(b * b - 4 * a * c)
    r1, r2 = (-b + disc) / (2 * a), (-b - disc) / (2 * a)
    roots = sorted((r1, r2), key=lambda r: (r.real, r.imag), reverse=True)
    return _clean(roots[0]), _clean(roots[1])


def _clean(x: complex) -> complex:
    # snap rounding noise so that exponents like 2 - 1e-17j compare cleanly
    re = round(x.real) if abs(x.real - round(x.real)) < 1e-13 else x.real
    im = 0.0 if abs(x.imag) < 1e-13 * max(1.0, abs(x)) else x.imag
    return complex(re, im)


@dataclass(frozen=True)
class RecurrenceBand:
    """One balance ``Σ_d coef_d a_(n-d) = 0``; ``terms`` holds ``(d, coef_d)``."""

    n: int
    terms: tuple

    def coef(self, d: int) -> complex:
        for dd, c in self.terms:
            if dd == d:
                return c
        return 0j

    @property
    def width(self) -> int:
        return len(self.terms)


def synthesize_recurrence(ode: LocalOde, center, mu, n: int) -> RecurrenceBand:
    """The order-``n`` balance of the Frobenius substitution at ``center``."""
    sh = _shift(ode, center)
    return _band(sh, complex(mu), n)


def _band(sh: _Shifted, mu: complex, n: int) -> RecurrenceBand:
    return RecurrenceBand(n, tuple((d, sh.slot(d, n - d + mu)) for d in range(sh.width)))


@dataclass(frozen=True)
class FrobeniusSeries:
    """``v(z) = (z - center)^μ Σ a_n (z - center)^n`` with ``a_0 = 1``."""

    center: complex
    mu: complex
    coeffs: np.ndarray
    band: int
    resonances: tuple = field(default=())

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, z) -> tuple[complex, complex, complex]:
        """(v, v', v'') at ``z`` (principal branch of ``(z-center)^μ``)."""
        return eval_frobenius(self.coeffs, self.mu, complex(z) - self.center)

    def tail_magnitude(self, z, k: int = 3) -> float:
        """Largest of the last ``k`` terms ``|a_n h^n|`` at ``z`` (convergence proxy)."""
        h = abs(complex(z) - self.center)
        n = np.arange(len(self.coeffs))
        terms = np.abs(self.coeffs) * h ** n
        return float(np.max(terms[-k:]))

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "mu": [self.mu.real, self.mu.imag],
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, band: int = 0) -> "FrobeniusSeries":
        return cls(complex(*data["center"]), complex(*data["mu"]),
                   np.array([complex(*c) for c in data["coeffs"]]), band)


def _is_int(x: complex) -> bool:
    return x.imag == 0 and float(x.real).is_integer()


def eval_frobenius(coeffs, mu: complex, h: complex) -> tuple[complex, complex, complex]:
    """``f = h^μ Σ c_n h^n`` and its first two derivatives in ``h``."""
    s0 = s1 = s2 = 0j
    for a in coeffs[::-1]:
        s2 = s2 * h + 2 * s1
        s1 = s1 * h + s0
        s0 = s0 * h + a
    mu = complex(mu)
    if mu == 0:
        return s0, s1, s2
    if _is_int(mu) and mu.real > 0:
        m = int(mu.real)
        hm, hm1, hm2 = h ** m, m * h ** (m - 1), m * (m - 1) * h ** (m - 2) if m >= 2 else 0j
        return hm * s0, hm * s1 + hm1 * s0, hm * s2 + 2 * hm1 * s1 + hm2 * s0
    if h == 0:
        raise ParameterError("cannot differentiate a non-integer power at the center")
    hm = cmath.exp(mu * cmath.log(h))
    v = hm * s0
    v1 = hm * (s1 + mu * s0 / h)
    v2 = hm * (s2 + 2 * mu * s1 / h + mu * (mu - 1) * s0 / (h * h))
    return v, v1, v2


RESONANCE_TOL = 1e-8


def frobenius_coeffs(ode: LocalOde, center, mu, N: int, *, free_value: complex = 0j) -> FrobeniusSeries:
    """Forward-recurrence Frobenius coefficients ``a_0 = 1, a_1, ..., a_N``.

    When the leading coefficient vanishes at some ``n > 0`` the balance is
    checked: a vanishing right-hand side (an apparent resonance) leaves
    ``a_n`` free and it is set to ``free_value``; otherwise
    :class:`LogarithmicCase` is raised.
    """
    sh = _shift(ode, center)
    mu = complex(mu)
    lead0 = sh.slot(0, mu)
    scale0 = abs(sh.coef(sh.A, sh.k)) * (1 + abs(mu)) ** 2 + abs(sh.coef(sh.B, sh.k - 1)) * (1 + abs(mu)) \
        + abs(sh.coef(sh.C, sh.k - 2))
    if abs(lead0) > 1e-9 * max(scale0, 1e-300):
        raise ParameterError(f"mu={mu} is not an indicial exponent at {center}")
    width = sh.width
    a = np.zeros(N + 1, dtype=complex)
    a[0] = 1.0
    resonances = []
    for n in range(1, N + 1):
        band = _band(sh, mu, n)
        lead = band.terms[0][1]
        contrib = [c * a[n - d] for d, c in band.terms[1:] if n - d >= 0]
        rhs = -sum(contrib, 0j)
        mag = sum((abs(x) for x in contrib), 0.0)
        lead_scale = abs(sh.coef(sh.A, sh.k)) * (abs(n + mu) + 1) ** 2
        if abs(lead) <= 1e-10 * max(lead_scale, 1e-300):
            if abs(rhs) <= RESONANCE_TOL * max(mag, 1e-300):
                a[n] = free_value
                resonances.append(n)
                continue
            raise LogarithmicCase(
                f"resonance at n={n} (mu={mu}) with nonzero balance {abs(rhs):.3e}; "
                "the second solution needs a logarithmic term")
        a[n] = rhs / lead
    return FrobeniusSeries(complex(center), mu, a, width, tuple(resonances))


def recurrence_residual(ode: LocalOde, series: FrobeniusSeries) -> float:
    """Largest relative violation of the synthesized recurrence over the coefficients."""
    sh = _shift(ode, series.center)
    worst = 0.0
    a = series.coeffs
    for n in range(1, series.N + 1):
        band = _band(sh, series.mu, n)
        parts = [c * a[n - d] for d, c in band.terms if n - d >= 0]
        mag = sum(abs(x) for x in parts)
        if mag > 0:
            worst = max(worst, abs(sum(parts)) / mag)
    return worst


# ---------------------------------------------------------------------------
# Closed-form bands for comparison


def closed_form_band_E1(p: BcHeunParams, mu, n: int) -> RecurrenceBand:
    """Four-term band of the ``v = z^γ u'`` expansion about ``z0`` in closed form.

    Slot d multiplies ``a_(n-d)``: (S_n, R_(n-1), Q_(n-2), P_(n-3)).
    """
    z0 = p.z0  # raises AlphaZero
    g, d, e, a = p.gamma, p.delta, p.epsilon, p.alpha
    mu = complex(mu)

    def S(j):
        return z0 * (j + mu) * (j + mu - 2)

    def R(j):
        return z0 * (d + z0 * e) * (j + mu - 1) + (j + mu) * (j + mu - 1 - g)

    def Q(j):
        return -g * (d + z0 * e) + (d + 2 * z0 * e) * (j + mu)

    def P(j):
        return a + e * (j + mu + 1 - g)

    return RecurrenceBand(n, ((0, S(n)), (1, R(n - 1)), (2, Q(n - 2)), (3, P(n - 3))))


def closed_form_tp_E2(p: BcHeunParams, mu, n: int, root: complex, other: complex) -> tuple[complex, complex]:
    """Leading and trailing slots of the five-term band about ``root``, as printed.

    Returns ``(T_n, P_(n-4))`` with ``T_n = z1(z1-z2)(n+μ)(n-1+μ)`` and
    ``P_n = α + ε(n+μ+1-γ)``.
    """
    mu = complex(mu)
    t = root * (root - other) * (n + mu) * (n - 1 + mu)
    pn = p.alpha + p.epsilon * (n - 4 + mu + 1 - p.gamma)
    return t, pn


def slot_polynomials(ode: LocalOde, center, mu, n_max: int = 10, degrees=(2, 2, 1)):
    """Fit slots 1..len(degrees) of the band as polynomials in ``μ1 = n - d + μ``.

    Returns ``[(coefficients, max_fit_residual), ...]``; the coefficient order
    is ascending in μ1.
    """
    sh = _shift(ode, center)
    mu = complex(mu)
    out = []
    for d, deg in enumerate(degrees, start=1):
        ns = np.arange(d, d + n_max + 1)
        mu1 = ns - d + mu
        vals = np.array([sh.slot(d, m) for m in mu1])
        V = np.vander(mu1, deg + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
        resid = np.max(np.abs(V @ coef - vals)) / max(np.max(np.abs(vals)), 1e-300)
        out.append((coef, float(resid)))
    return out


def _band_scale(band: RecurrenceBand) -> float:
    return max(max(abs(c) for _, c in band.terms), 1e-300)


def recurrence_report(p: BcHeunParams, kind: OdeKind | str, n_max: int = 25,
                      root: str = "z1") -> dict:
    """Engine-synthesized bands against the printed closed forms.

    ``AUX_V12`` (about ``z0``, ``μ = 2``): every slot of the four-term band.
    ``AUX_W23`` (about ``z1`` or ``z2``, larger exponent): the leading and
    trailing slots against their printed forms, and polynomial fits of the
    middle slots of degrees 2, 2, 1 in ``n``.

    Errors are relative to the largest slot of the same band, since single
    slots (the leading one at ``n = 0``) can vanish exactly.
    """
    kind = OdeKind(kind)
    ode = build_local_ode(kind, p)
    report = {}
    if kind is OdeKind.AUX_V12:
        z0 = p.z0
        names = ("S", "R", "Q", "P")
        errs = dict.fromkeys(names, 0.0)
        for n in range(n_max + 1):
            eng = synthesize_recurrence(ode, z0, 2, n)
            ref = closed_form_band_E1(p, 2, n)
            scale = max(_band_scale(eng), _band_scale(ref))
            for d, name in enumerate(names):
                errs[name] = max(errs[name], abs(eng.coef(d) - ref.coef(d)) / scale)
        report.update(errs)
        return report
    if kind is not OdeKind.AUX_W23:
        raise ParameterError(f"no printed recurrence to compare for {kind.value}")
    s = model.singular_structure(p)
    center, other = (s.z1, s.z2) if root == "z1" else (s.z2, s.z1)
    mu = indicial_exponents(ode, center)[0]
    t_err = p_err = 0.0
    for n in range(n_max + 1):
        eng = synthesize_recurrence(ode, center, mu, n)
        t_ref, p_ref = closed_form_tp_E2(p, mu, n, center, other)
        scale = _band_scale(eng)
        t_err = max(t_err, abs(eng.coef(0) - t_ref) / scale)
        if eng.width > 4:
            p_err = max(p_err, abs(eng.coef(4) - p_ref) / scale)
    report["T"] = t_err
    report["P"] = p_err
    for name, (_, resid) in zip(("S_fit", "R_fit", "Q_fit"),
                                slot_polynomials(ode, center, mu, n_max)):
        report[name] = resid
    report["mu"] = mu
    return report
