import cmath
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcheun import model
from bcheun.errors import AlphaPlusEpsZero, AlphaZero, OriginSingular, ParameterError
from bcheun.model import BcHeunParams
from bcheun.reference import origin_series

from _util import random_params, rel

finite = st.floats(-3, 3)
cplx = st.builds(complex, finite, finite)


def test_params_coerce_and_flags():
    p = BcHeunParams(1, 2, 0, 0, 0)
    assert isinstance(p.gamma, complex)
    assert p.is_reducible_eps0 and p.is_degenerate
    with pytest.raises(AlphaZero):
        _ = p.z0
    with pytest.raises(ParameterError):
        BcHeunParams(float("nan"), 0, 0, 1, 1)


@settings(max_examples=50, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx)
def test_json_round_trip(g, d, e, a, q):
    p = BcHeunParams(g, d, e, a, q)
    data = json.loads(p.to_json())
    assert sorted(data) == ["alpha", "delta", "epsilon", "gamma", "q"]
    assert all(len(v) == 2 for v in data.values())
    assert BcHeunParams.from_json(p.to_json()) == p


def test_from_dict_errors():
    with pytest.raises(ParameterError):
        BcHeunParams.from_dict({"gamma": [1, 0]})
    with pytest.raises(ParameterError):
        BcHeunParams.from_dict({k: [1, 2, 3] for k in ("gamma", "delta", "epsilon", "alpha", "q")})


def test_from_ronveaux_examples():
    assert model.from_ronveaux(0, 0, 2, 0) == BcHeunParams(1, 0, -2, 0, 0)
    assert model.from_ronveaux(1, 2, 5, 0) == BcHeunParams(2, -2, -2, 2, 2)


def test_from_dlmf_examples():
    assert model.from_dlmf(0, 0, 0, 0) == BcHeunParams(0, 0, -1, 0, 0)
    assert model.from_dlmf(1, 2, 3, 4) == BcHeunParams(-1, -2, -1, 3, 4)


def _series_solution(p, zs):
    s = origin_series(p, 80)
    return [(z, *s.evaluate(z)) for z in zs]


def test_ronveaux_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(5):
        ar, br, gr, dr = (complex(*rng.uniform(-1, 1, 2)) for _ in range(4))
        p = model.from_ronveaux(ar, br, gr, dr)
        zs = [complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(5)]
        for z, u, u1, u2 in _series_solution(p, zs):
            assert model.ronveaux_residual(ar, br, gr, dr, z, u, u1, u2).relative <= 1e-10


def test_dlmf_round_trip():
    rng = np.random.default_rng(12)
    for _ in range(5):
        gd, dd, ad, qd = (complex(*rng.uniform(-1, 1, 2)) for _ in range(4))
        p = model.from_dlmf(gd, dd, ad, qd)
        zs = [complex(*rng.uniform(-0.5, 0.5, 2)) for _ in range(5)]
        for z, u, u1, u2 in _series_solution(p, zs):
            assert model.dlmf_residual(gd, dd, ad, qd, z, u, u1, u2).relative <= 1e-10


def test_singular_structure_examples():
    s = model.singular_structure(BcHeunParams(0, 0, 1, 1, 1))
    assert s.z0 == 1
    assert abs(s.z1 - (1 + 2 ** -0.5)) < 1e-15 and abs(s.z2 - (1 - 2 ** -0.5)) < 1e-15
    s = model.singular_structure(BcHeunParams(-2, 1, 1, 1, 1))
    assert s.degenerate and s.z1 == s.z2 == 1
    s = model.singular_structure(BcHeunParams(1, 0, 1, 1, 1))
    assert s.root_at_origin and abs(s.z1 - 2) < 1e-15 and abs(s.z2) < 1e-15


def test_singular_structure_errors():
    with pytest.raises(AlphaZero):
        model.singular_structure(BcHeunParams(1, 1, 1, 0, 1))
    with pytest.raises(AlphaPlusEpsZero):
        model.singular_structure(BcHeunParams(1, 1, -1, 1, 1))


def test_vieta_identities():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        p = random_params(rng)
        if abs(p.alpha + p.epsilon) < 1e-3:
            continue
        s = model.singular_structure(p)
        z0 = s.z0
        assert abs((s.z1 + s.z2) - 2 * z0) <= 1e-13 * max(abs(z0), abs(s.z1), 1e-300) * 4
        prod = z0 * z0 - (p.gamma + p.delta * z0 + p.epsilon * z0 * z0) / (p.alpha + p.epsilon)
        assert abs(s.z1 * s.z2 - prod) <= 1e-13 * max(abs(prod), abs(s.z1) * abs(s.z2), abs(z0) ** 2) * 4


def test_degenerate_crosscheck():
    p = BcHeunParams(-2, 1, 1, 1, 1)
    assert model.degenerate_crosscheck(p) == 0
    rng = np.random.default_rng(2)
    p = random_params(rng)
    g = p.gamma + p.delta * p.z0 + p.epsilon * p.z0 ** 2
    assert rel(model.degenerate_crosscheck(p), p.alpha ** 2 * g) < 1e-13


def test_polynomial_examples():
    p = BcHeunParams(0, 0, 0, 0, 1)
    for z in (0.3, 2 + 1j, -4):
        assert model.pi_quadratic(p, z) == 1
    p = BcHeunParams(0.7, 0, 0, 1.3, 0.4)
    for z in (0.3, 2 + 1j):
        assert abs(model.p3_delta(p, z) - (1.3 * z - 0.4) ** 2) < 1e-14
    p = BcHeunParams(0.7, 0, 0.9, 1.3, 0.4)
    for z in (0.3, 2 + 1j):
        assert abs(model.p3_eps(p, z) - (1.3 * z - 0.4) ** 2) < 1e-13
    p = BcHeunParams(0.7, 0.2, 0.9, 1.3, 0.4)
    assert model.p3_delta(p, 0) == p.q ** 2
    assert abs(model.p3_eps(p, 0) - (p.q ** 2 + p.q * p.delta * (p.gamma - 1))) < 1e-15


def _horner(coeffs, z):
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc


@settings(max_examples=50, deadline=None)
@given(cplx, cplx, cplx, cplx, cplx, cplx)
def test_polynomials_match_listed_coefficients(g, d, e, a, q, z):
    p = BcHeunParams(g, d, e, a, q)
    pi = [a * (a + e - g * e), -(a * (2 * q + g * d) + q * e * (2 - g)), q * (q + (g - 1) * d)]
    pd = [-a * d * e, a * a + q * d * e + a * e * (1 - g), -q * (2 * a + (2 - g) * e), q * q]
    pe = [-a * d * e, a * a + q * d * e, -a * (2 * q + g * d), q * q + q * d * (g - 1)]
    for f, c in ((model.pi_quadratic, pi), (model.p3_delta, pd), (model.p3_eps, pe)):
        ref = _horner(c, z)
        scale = sum(abs(x) * abs(z) ** k for k, x in enumerate(reversed(c))) + 1e-300
        assert abs(f(p, z) - ref) <= 1e-13 * scale


def test_polynomial_degree_by_differences():
    rng = np.random.default_rng(3)
    p = random_params(rng)
    h = 0.1
    z = 0.2 + 0.1j
    for f, deg in ((model.pi_quadratic, 2), (model.p3_delta, 3), (model.p3_eps, 3)):
        vals = np.array([f(p, z + k * h) for k in range(deg + 2)])
        diff = np.diff(vals, n=deg + 1)[0]
        assert abs(diff) <= 1e-12 * np.max(np.abs(vals))


def test_residual_basics():
    p = BcHeunParams(0.4, 0.3, 0.2, 0, 0)
    r = model.residual(p, 0.5, 3.0, 0, 0)
    assert r.value == 0 and r.relative == 0
    with pytest.raises(OriginSingular):
        model.residual(p, 0, 1, 1, 1)


def test_residual_quadrature_solution_alpha_q_zero():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g, d, e = (complex(*rng.uniform(-2, 2, 2)) for _ in range(3))
        p = BcHeunParams(g, d, e, 0, 0)
        z = complex(*rng.uniform(0.1, 1.5, 2))
        E = cmath.exp(-d * z - e * z * z / 2 - g * cmath.log(z))
        u1, u2 = E, E * (-d - e * z - g / z)
        assert model.residual(p, z, 1.0, u1, u2).relative <= 1e-12


def test_residual_origin_series():
    rng = np.random.default_rng(8)
    for _ in range(10):
        p = random_params(rng)
        s = origin_series(p, 80)
        z = 0.3 * cmath.exp(1j * rng.uniform(-3, 3))
        assert model.residual(p, z, *s.evaluate(z)).relative <= 1e-10
