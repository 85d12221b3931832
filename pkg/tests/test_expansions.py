import cmath
import json

import numpy as np
import pytest

from bcheun import expansions as ex
from bcheun.errors import (
    AlphaZero,
    AtAuxRoot,
    AtExtraSingularity,
    BetaParameterPole,
    ConditionsNotMet,
    DeltaZero,
    EpsilonZero,
    NoRoot,
    OutsideRegion,
    QZero,
    RootAtOriginChosen,
)
from bcheun.expansions import ExpansionKind, VKind
from bcheun.model import BcHeunParams, residual, singular_structure
from bcheun.reference import crosses_branch_cut, integrate, origin_series

from _util import admissible_draws, oracle_value, project_on_origin_basis, random_params, rel, non_integer

P_EX = BcHeunParams(0.5, 0.3, 1, 1.2, 0.7)
KINDS = [k.value for k in ExpansionKind]


@pytest.fixture(scope="module")
def draws():
    rng = np.random.default_rng(101)
    got, _ = admissible_draws(rng, 6, 40)
    assert len(got) == 6
    return got


def _oracle_error(sol, base, z):
    coeffs, basis = project_on_origin_basis(sol, base)
    return rel(sol(z), oracle_value(basis, coeffs, z)[0])


# ---------------------------------------------------------------------------
# worked examples


def test_beta_single_matches_oracle_at_03_z0():
    # scale matched at z0/2, where the truncation is converged; at 0.2 z0 it
    # is not (and the solution says so)
    sol = ex.expand_beta_single(P_EX, 40)
    z0 = P_EX.z0
    assert sol.converged_at(0.3 * z0) and not sol.converged_at(0.2 * z0)
    assert _oracle_error(sol, 0.5 * z0, 0.3 * z0) <= 1e-8


def test_beta_single_residual_decay_at_04_z0():
    z = 0.4 * P_EX.z0
    r5 = ex.expand_beta_single(P_EX, 5).residual(z)
    r40 = ex.expand_beta_single(P_EX, 40).residual(z)
    assert r40 <= 1e-4 * r5


def test_limit_mode_c0_rule_fails_for_this_example():
    # forcing C0 = 0 (Re(1-γ) > 0) does not give a solution: u(0) is the
    # regular-branch coefficient of the solution picked by the series
    sol = ex.expand_beta_single(P_EX, 80, c0_mode="limit")
    assert sol.c0 == 0
    assert sol.residual(0.4 * P_EX.z0) > 0.1
    rec = ex.expand_beta_single(P_EX, 80)
    assert abs(rec.c0 + 1.87) < 0.01
    # slow (algebraic) agreement: the origin lies on the circle of convergence
    coeffs, _ = project_on_origin_basis(rec, 0.3 * P_EX.z0)
    assert rel(coeffs[0], rec.c0) < 1e-2


def test_limit_mode_needs_positive_real_part():
    with pytest.raises(ConditionsNotMet):
        ex.expand_beta_single(BcHeunParams(1.5, 0.3, 1, 1.2, 0.7), 10, c0_mode="limit")


@pytest.mark.parametrize("kind", ["gamma_delta", "gamma_eps"])
def test_gamma_residual_decay(kind):
    z = 0.4 * P_EX.z0
    r5 = ex.expand(kind, P_EX, 5).residual(z)
    r40 = ex.expand(kind, P_EX, 40).residual(z)
    assert r40 <= 1e-4 * r5


def test_beta_double_matches_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = random_params(rng)
        if not non_integer(p.gamma) or abs(p.alpha + p.epsilon) < 0.1:
            continue
        s = singular_structure(p)
        try:
            sol = ex.expand_beta_double(p, 60)
        except Exception:
            continue
        z, base = 0.3 * s.z1, 0.35 * s.z1
        if not (sol.in_region(z) and sol.in_region(base) and sol.converged_at(z)):
            continue
        assert _oracle_error(sol, base, z) <= 1e-7
        return
    pytest.fail("no admissible draw found")


def test_beta_double_degenerate():
    p = BcHeunParams(-2, 1, 1, 1, 1)
    sol = ex.expand_beta_double(p, 60)
    assert sol.series.band == 4 and sol.series.mu == 2
    z = 0.6
    assert sol.residual(z) <= 1e-10


def test_beta_double_generic_exponent():
    # the larger exponent of the auxiliary equation at z1 is 2, not 1
    sol = ex.expand_beta_double(P_EX, 10)
    assert sol.series.mu == 2 and sol.series.band == 5


# ---------------------------------------------------------------------------
# cross-method agreement and oracles


def test_cross_method_agreement(draws):
    for p, got in draws:
        for name, (sol, base, pts) in got.items():
            coeffs, basis = project_on_origin_basis(sol, base)
            for z in pts:
                assert rel(sol(z), oracle_value(basis, coeffs, z)[0]) <= 1e-7
                assert sol.residual(z) <= 1e-8


def test_gamma_agrees_with_beta_single(draws):
    for p, got in draws:
        bs, base, _ = got["beta_single"]
        for kind in ("gamma_delta", "gamma_eps"):
            g = got[kind][0]
            z = base
            # pairs agree up to the scale fixed at the base point
            (A1, B1), basis = project_on_origin_basis(bs, z)
            (A2, B2), _ = project_on_origin_basis(g, z)
            for zz in got["beta_single"][2]:
                if not g.in_region(zz):
                    continue
                v1 = oracle_value(basis, (A1, B1), zz)[0]
                v2 = oracle_value(basis, (A2, B2), zz)[0]
                ratio = g(zz) / v2
                assert rel(bs(zz) * ratio, v1 * ratio) <= 1e-7


def test_matches_integrator(draws):
    for p, got in draws[:3]:
        for name, (sol, base, pts) in got.items():
            ub, dub, _ = sol.evaluate(base)
            for z in pts[:2]:
                end = integrate(p, base, (ub, dub), z).end
                assert rel(sol(z), end[0]) <= 1e-7


def test_term_derivative_identities(draws):
    for p, got in draws:
        for name, (sol, base, pts) in got.items():
            for z in pts[:2]:
                assert ex.term_derivative_error(sol, z) <= 1e-7


# ---------------------------------------------------------------------------
# recovery


def test_recover_u_from_v_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(10):
        p = random_params(rng)
        if not non_integer(p.gamma):
            continue
        s = origin_series(p, 120)
        for _ in range(3):
            z = 0.4 * abs(p.z0) * cmath.exp(1j * rng.uniform(-3, 3))
            u, u1, u2 = s.evaluate(z)
            for kind in VKind:
                k0 = {VKind.Z_GAMMA: 0, VKind.EXP_DELTA: p.delta * z,
                      VKind.EXP_EPS: p.epsilon * z * z / 2}[kind]
                dk = {VKind.Z_GAMMA: 0, VKind.EXP_DELTA: p.delta,
                      VKind.EXP_EPS: p.epsilon * z}[kind]
                phi = cmath.exp(k0 + p.gamma * cmath.log(z))
                v = phi * u1
                v1 = phi * (u2 + (dk + p.gamma / z) * u1)
                assert rel(ex.recover_u_from_v(p, kind, v, v1, z), u) <= 1e-10


def test_recover_v_from_w_round_trip():
    rng = np.random.default_rng(12)
    for _ in range(10):
        p = random_params(rng)
        if not non_integer(p.gamma) or abs(p.alpha + p.epsilon) < 0.1:
            continue
        c = origin_series(p, 150).coeffs
        for _ in range(3):
            z = 0.4 * abs(p.z0) * cmath.exp(1j * rng.uniform(-3, 3))
            d = [np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(c, k))
                 for k in range(4)]
            f = cmath.exp((1 + p.gamma) * cmath.log(z))
            w = f * d[2]
            w1 = f * ((1 + p.gamma) / z * d[2] + d[3])
            assert rel(ex.recover_v_from_w(p, w, w1, z), d[1]) <= 1e-9


def test_recovery_errors():
    s = singular_structure(P_EX)
    with pytest.raises(AtAuxRoot):
        ex.recover_v_from_w(P_EX, 1.0, 1.0, s.z1)
    with pytest.raises(AtExtraSingularity):
        ex.recover_u_from_v(P_EX, VKind.Z_GAMMA, 1.0, 1.0, P_EX.z0)


@pytest.mark.parametrize("kind", KINDS)
def test_constants_independent_of_recovery_point(kind):
    z0 = P_EX.z0
    sol = ex.expand(kind, P_EX, 60)
    if kind == "beta_double":
        pts = [sol.center * (1 - t) for t in (0.3, 0.35, 0.4, 0.45, 0.5)]
    else:
        pts = [t * z0 * cmath.exp(0.2j) for t in (0.45, 0.5, 0.55, 0.6, 0.65)]
    sols = [ex.expand(kind, P_EX, 60, recovery_point=z) for z in pts]
    c0s = [s.c0 for s in sols]
    c1s = [s.c1 for s in sols]
    assert max(abs(c - c0s[0]) for c in c0s) <= 1e-9 * max(abs(c0s[0]), 1.0)
    assert max(abs(c - c1s[0]) for c in c1s) <= 1e-8 * max(abs(c1s[0]), 1.0)


# ---------------------------------------------------------------------------
# regions and errors


def test_region_discipline():
    sol = ex.expand_beta_single(P_EX, 20)
    with pytest.raises(OutsideRegion, match="outside validity region"):
        sol(1.2 * P_EX.z0)
    assert not sol.in_region(1.01 * P_EX.z0)
    sol(1.2 * P_EX.z0, allow_outside=True)


def test_expansion_errors():
    with pytest.raises(DeltaZero):
        ex.expand_gamma_delta(BcHeunParams(0.5, 0, 1, 1, 1), 5)
    with pytest.raises(EpsilonZero):
        ex.expand_gamma_eps(BcHeunParams(0.5, 1, 0, 1, 1), 5)
    with pytest.raises(EpsilonZero):
        ex.expand_beta_single(BcHeunParams(0.5, 1, 0, 1, 1), 5)
    with pytest.raises(RootAtOriginChosen):
        ex.expand_beta_double(BcHeunParams(0.5, 0.5, 1, 1, 1), 5, "z2")
    with pytest.raises(BetaParameterPole):
        ex.expand_beta_single(BcHeunParams(2, 1, 1, 1, 1), 5)
    with pytest.raises(AlphaZero):
        ex.expand_beta_single(BcHeunParams(0.5, 1, 1, 0, 1), 5)
    with pytest.raises(QZero):
        ex.expand_gamma_delta(BcHeunParams(0.5, 1, 1, 1, 0), 5)


def test_flags_non_convergence():
    # too few terms far from the center: the solution says so
    z = 0.45 * P_EX.z0 * cmath.exp(2.5j)
    assert not ex.expand_gamma_delta(P_EX, 3).converged_at(z)
    assert ex.expand_gamma_delta(P_EX, 60).converged_at(z)


def test_json():
    sol = ex.expand_beta_double(P_EX, 6)
    d = json.loads(sol.to_json())
    assert d["kind"] == "beta_double" and d["N"] == 6 and d["root_choice"] == "z1"
    assert len(d["series"]["coeffs"]) == 7


# ---------------------------------------------------------------------------
# termination


@pytest.fixture(scope="module")
def terminating():
    return ex.find_terminating_params(0.5, 1, 1, 1, 1)


def test_termination_example(terminating):
    p = terminating
    assert abs(p.alpha + 1 * (1 + 3 - 0.5)) < 1e-15
    cert = ex.check_termination(p, "beta_single", 1)
    assert cert.ok and max(cert.tail_norms[:2]) <= 1e-12
    assert cert.global_residual <= 1e-8 and cert.p_n <= 1e-12
    assert json.loads(cert.to_json())["status"] == "terminating"


def test_termination_basin(terminating):
    for f in (0.9, 1.1):
        try:
            p = ex.find_terminating_params(0.5, 1, 1, f, f)
        except NoRoot:
            continue
        assert abs(p.q - terminating.q) <= 1e-8 and abs(p.delta - terminating.delta) <= 1e-8


def test_terminating_solution_is_finite_sum(terminating):
    p = terminating
    sol = ex.expand_beta_single(p, 1)
    for z in ex.ring_points(0.3 * abs(p.z0), 8):
        assert sol.residual(z, allow_outside=True) <= 1e-8


def test_generic_params_do_not_terminate():
    rng = np.random.default_rng(13)
    for _ in range(10):
        p = random_params(rng)
        if not non_integer(p.gamma):
            continue
        rep = ex.check_termination(p, "beta_single", 2)
        assert not rep.ok and max(rep.tail_norms) > 1e-6


def test_p_n_vanishes_by_construction():
    for N in (1, 3, 6):
        p = BcHeunParams(0.5, 0.4, 1.3, -1.3 * (N + 3 - 0.5), 0.9)
        rep = ex.check_termination(p, "beta_single", N)
        assert rep.p_n <= 1e-14


# ---------------------------------------------------------------------------
# quadrature solution


def test_quadrature_special():
    rng = np.random.default_rng(14)
    for _ in range(10):
        g, d, e = (complex(*rng.uniform(-1, 1, 2)) for _ in range(3))
        p = ex.special_params(g, d, e)
        if abs(p.q) < 0.1:
            continue
        assert max(ex.quadrature_conditions(p)) < 1e-14
        for _ in range(5):
            z = p.z0 * complex(rng.uniform(0.2, 0.8), rng.uniform(-0.2, 0.2))
            if abs(z - p.z0) < 0.05 * abs(p.z0) or crosses_branch_cut(p.z0 / 2, z):
                continue
            for c in ((1, 0), (0, 1), (1, 1)):
                u = ex.quadrature_special(p, z, *c, derivatives=True)
                assert residual(p, z, *u).relative <= 1e-9


def test_quadrature_special_c1_zero_branch():
    p = ex.special_params(0.3, 0.7, 1.1)
    z = 0.4 + 0.2j
    h = (p.gamma + p.delta * z + p.epsilon * z * z) / (p.alpha * z - p.q)
    assert rel(ex.quadrature_special(p, z, 0, 2), 2 * h) < 1e-15


def test_quadrature_special_conditions():
    with pytest.raises(ConditionsNotMet):
        ex.quadrature_special(P_EX, 0.3)
