"""The biconfluent Heun equation

    u'' + (γ/z + δ + εz) u' + (αz - q)/z u = 0

its parameter set, conversions from two other canonical forms, the derived
singular points of the auxiliary equations and the pointwise residual used to
check candidate solutions.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

from .errors import AlphaPlusEpsZero, AlphaZero, OriginSingular, ParameterError

_FIELDS = ("gamma", "delta", "epsilon", "alpha", "q")

# |x| below this counts as zero when a parameter flag is derived
PARAM_ZERO = 1e-12


@dataclass(frozen=True)
class BcHeunParams:
    """Parameters (γ, δ, ε, α, q) of the equation above."""

    gamma: complex
    delta: complex
    epsilon: complex
    alpha: complex
    q: complex

    def __post_init__(self):
        for name in _FIELDS:
            val = complex(getattr(self, name))
            if not (cmath.isfinite(val)):
                raise ParameterError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, val)

    @property
    def is_reducible_eps0(self) -> bool:
        return abs(self.epsilon) <= PARAM_ZERO

    @property
    def is_degenerate(self) -> bool:
        return abs(self.alpha) <= PARAM_ZERO and abs(self.q) <= PARAM_ZERO

    @property
    def z0(self) -> complex:
        if abs(self.alpha) <= PARAM_ZERO:
            raise AlphaZero("z0 = q/alpha needs alpha != 0")
        return self.q / self.alpha

    def replace(self, **changes) -> "BcHeunParams":
        vals = {k: getattr(self, k) for k in _FIELDS}
        vals.update(changes)
        return BcHeunParams(**vals)

    def to_dict(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in _FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "BcHeunParams":
        missing = [k for k in _FIELDS if k not in data]
        if missing:
            raise ParameterError(f"missing parameter fields: {missing}")
        return cls(**{k: _complex_from_json(data[k]) for k in _FIELDS})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "BcHeunParams":
        return cls.from_dict(json.loads(text))


def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ParameterError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ParameterError(f"cannot read complex value from {v!r}")


def from_ronveaux(alpha_r, beta_r, gamma_r, delta_r) -> BcHeunParams:
    """Map the form ``u'' + (1+α-βz-2z²)/z u' + ((γ-α-2)z - (δ+(1+α)β)/2)/z u = 0``."""
    alpha_r, beta_r = complex(alpha_r), complex(beta_r)
    return BcHeunParams(
        gamma=1 + alpha_r,
        delta=-beta_r,
        epsilon=-2,
        alpha=complex(gamma_r) - alpha_r - 2,
        q=(complex(delta_r) + (1 + alpha_r) * beta_r) / 2,
    )


def from_dlmf(gamma_d, delta_d, alpha_d, q_d) -> BcHeunParams:
    """Map the form ``u'' - (γ/z + δ + z) u' + (αz - q)/z u = 0``."""
    return BcHeunParams(
        gamma=-complex(gamma_d),
        delta=-complex(delta_d),
        epsilon=-1,
        alpha=alpha_d,
        q=q_d,
    )


@dataclass(frozen=True)
class SingularStructure:
    z0: complex
    z1: complex
    z2: complex
    degenerate: bool
    root_at_origin: bool


def singular_structure(p: BcHeunParams) -> SingularStructure:
    """Extra singular points ``z0 = q/α`` and the roots ``z1, z2``.

    ``z1,2 = z0 ± sqrt((γ + δ z0 + ε z0²)/(α + ε))`` with the principal root;
    ``z1`` is the "+" root.
    """
    if abs(p.alpha) <= PARAM_ZERO:
        raise AlphaZero("singular_structure needs alpha != 0")
    ape = p.alpha + p.epsilon
    if abs(ape) <= PARAM_ZERO:
        raise AlphaPlusEpsZero("z1, z2 undefined for alpha + epsilon = 0")
    z0 = p.q / p.alpha
    num = p.gamma + p.delta * z0 + p.epsilon * z0 * z0
    scale = 1 + abs(p.gamma) + abs(p.delta * z0) + abs(p.epsilon * z0 * z0)
    degenerate = abs(num) <= 1e-12 * scale
    root = 0j if degenerate else cmath.sqrt(num / ape)
    z1, z2 = z0 + root, z0 - root
    tiny = 1e-12 * max(1.0, abs(z0))
    return SingularStructure(z0, z1, z2, degenerate, abs(z1) <= tiny or abs(z2) <= tiny)


def pi_quadratic(p: BcHeunParams, z: complex) -> complex:
    """Numerator polynomial Π(z) of the equation for ``v = z^γ u'``."""
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q
    return (a * (a + e - g * e) * z * z
            - (a * (2 * q + g * d) + q * e * (2 - g)) * z
            + q * (q + (g - 1) * d))


def p3_delta(p: BcHeunParams, z: complex) -> complex:
    """Cubic numerator for ``v = e^{δz} z^γ u'``."""
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q
    return (-a * d * e * z ** 3
            + (a * a + q * d * e + a * e * (1 - g)) * z ** 2
            - q * (2 * a + (2 - g) * e) * z
            + q * q)


def p3_eps(p: BcHeunParams, z: complex) -> complex:
    """Cubic numerator for ``v = e^{εz²/2} z^γ u'``."""
    g, d, e, a, q = p.gamma, p.delta, p.epsilon, p.alpha, p.q
    return (-a * d * e * z ** 3
            + (a * a + q * d * e) * z ** 2
            - a * (2 * q + g * d) * z
            + q * q + q * d * (g - 1))


@dataclass(frozen=True)
class OdeResidual:
    value: complex
    relative: float


RESIDUAL_FLOOR = 1e-300


def residual(p: BcHeunParams, z: complex, u: complex, u1: complex, u2: complex) -> OdeResidual:
    """Residual of the equation at ``z`` for the triple (u, u', u'').

    ``relative`` divides by the largest of the three term magnitudes, so it
    is scale free.
    """
    z = complex(z)
    if z == 0:
        raise OriginSingular("residual is undefined at z = 0")
    t2 = complex(u2)
    t1 = (p.gamma / z + p.delta + p.epsilon * z) * u1
    t0 = (p.alpha * z - p.q) / z * u
    val = t2 + t1 + t0
    denom = max(abs(t2), abs(t1), abs(t0), RESIDUAL_FLOOR)
    return OdeResidual(val, abs(val) / denom)


def ronveaux_residual(alpha_r, beta_r, gamma_r, delta_r, z, u, u1, u2) -> OdeResidual:
    """Residual of the form mapped by :func:`from_ronveaux`, written out directly."""
    z = complex(z)
    t2 = complex(u2)
    t1 = (1 + alpha_r - beta_r * z - 2 * z * z) / z * u1
    t0 = ((gamma_r - alpha_r - 2) * z - (delta_r + (1 + alpha_r) * beta_r) / 2) / z * u
    val = t2 + t1 + t0
    return OdeResidual(val, abs(val) / max(abs(t2), abs(t1), abs(t0), RESIDUAL_FLOOR))


def dlmf_residual(gamma_d, delta_d, alpha_d, q_d, z, u, u1, u2) -> OdeResidual:
    """Residual of the form mapped by :func:`from_dlmf`, written out directly."""
    z = complex(z)
    t2 = complex(u2)
    t1 = -(gamma_d / z + delta_d + z) * u1
    t0 = (alpha_d * z - q_d) / z * u
    val = t2 + t1 + t0
    return OdeResidual(val, abs(val) / max(abs(t2), abs(t1), abs(t0), RESIDUAL_FLOOR))


def degenerate_crosscheck(p: BcHeunParams) -> complex:
    """``α²γ + qαδ + q²ε``: the denominator-cleared form of ``γ + δz0 + εz0²``."""
    return p.alpha ** 2 * p.gamma + p.q * p.alpha * p.delta + p.q ** 2 * p.epsilon
