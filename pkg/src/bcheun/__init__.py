"""Biconfluent Heun equation: incomplete Beta and Gamma function expansions,
Frobenius machinery for the auxiliary equations, and independent oracles."""

from .errors import BcHeunError, NumericalError, ParameterError
from .expansions import (
    ExpansionKind,
    ExpansionSolution,
    NotTerminating,
    TerminationCertificate,
    check_termination,
    expand,
    expand_beta_double,
    expand_beta_single,
    expand_gamma_delta,
    expand_gamma_eps,
    find_terminating_params,
    quadrature_special,
    recover_u_from_v,
    recover_v_from_w,
)
from .frobenius import (
    FrobeniusSeries,
    OdeKind,
    build_local_ode,
    frobenius_coeffs,
    indicial_exponents,
    synthesize_recurrence,
)
from .model import BcHeunParams, residual, singular_structure
from .reference import closed_form_eps0, integrate, origin_series, quadrature_alpha_q_zero

__version__ = "0.1.0"

__all__ = [
    "BcHeunError",
    "BcHeunParams",
    "ExpansionKind",
    "ExpansionSolution",
    "FrobeniusSeries",
    "NotTerminating",
    "NumericalError",
    "OdeKind",
    "ParameterError",
    "TerminationCertificate",
    "build_local_ode",
    "check_termination",
    "closed_form_eps0",
    "expand",
    "expand_beta_double",
    "expand_beta_single",
    "expand_gamma_delta",
    "expand_gamma_eps",
    "find_terminating_params",
    "frobenius_coeffs",
    "indicial_exponents",
    "integrate",
    "origin_series",
    "quadrature_alpha_q_zero",
    "quadrature_special",
    "recover_u_from_v",
    "recover_v_from_w",
    "residual",
    "singular_structure",
    "synthesize_recurrence",
]
