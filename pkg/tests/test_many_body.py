"""Kinematics, two-particle generators, mass operators and subsystem composition."""

import numpy as np
import pytest
from scipy.integrate import quad

from so14lab.many_body import (MassOperatorSpec, PolyGaussian, UnsupportedSystemError,
                               additivity_residual, band_symmetry, build_mass_operator,
                               compose_subsystems, expectation, from_center_of_mass,
                               from_jacobi, g_function, g_function_quadrature,
                               mass_squared_apply, particle_mass_operator, poincare_comparison,
                               relative_distance, relativistic_equivalence_residual,
                               to_center_of_mass, to_jacobi, two_particle_generators)
from so14lab.numerics.grids import GridFunction, make_log_grid
from so14lab.params import SystemParams
from so14lab.so14_generators import State


@pytest.fixture
def pair():
    return SystemParams.two_body(0.3, 0.7, R=10.0)


def two_body_packet(rng, s, degree=1):
    a1, a2 = s.masses / s.total_mass
    c = 1.3
    A = np.r_[[1 / (a2 * c) + 1 / (a1 * c)] * 3, [a2**2 / (a2 * c) + a1**2 / (a1 * c)] * 3]
    b = 0.2 * rng.standard_normal(6) + 0.1j * rng.standard_normal(6)
    return PolyGaussian.random(rng, A, b, degree=degree)


# --- kinematics ---------------------------------------------------------------

@pytest.mark.parametrize("masses", [(0.3, 0.7), (1.0, 1.0), (0.3, 0.5, 0.7)])
def test_jacobi_round_trip(masses):
    s = SystemParams.from_masses(list(masses), R=10.0)
    p = np.random.default_rng(0).standard_normal((len(masses), 8, 3))
    assert np.max(np.abs(from_jacobi(to_jacobi(p, s)) - p)) <= 1e-12


def test_jacobi_total_momentum(pair):
    p = np.random.default_rng(1).standard_normal((2, 5, 3))
    frame = to_jacobi(p, pair)
    np.testing.assert_allclose(frame.P, p.sum(axis=0), atol=1e-14)


def test_center_of_mass_round_trip(pair):
    x = np.random.default_rng(2).standard_normal((2, 8, 3))
    X, r = to_center_of_mass(x, pair)
    np.testing.assert_allclose(X, (0.3 * x[0] + 0.7 * x[1]) / 1.0, atol=1e-14)
    np.testing.assert_allclose(r, x[0] - x[1], atol=1e-14)
    assert np.max(np.abs(from_center_of_mass(X, r, pair) - x)) <= 1e-12


def test_unsupported_particle_counts():
    four = SystemParams.from_masses([1, 1, 1, 1], R=10.0)
    with pytest.raises(UnsupportedSystemError):
        to_jacobi(np.zeros((4, 1, 3)), four)
    three = SystemParams.from_masses([1, 1, 1], R=10.0)
    with pytest.raises(UnsupportedSystemError):
        to_center_of_mass(np.zeros((3, 1, 3)), three)
    with pytest.raises(ValueError):
        two_particle_generators(three)


# --- two-particle generators --------------------------------------------------

def test_additivity_of_exact_generators(pair):
    rng = np.random.default_rng(11)
    res = additivity_residual(pair, [two_body_packet(rng, pair)])
    assert len(res) == 17
    assert max(res.values()) <= 1e-10


def test_qplus_is_total_momentum(pair):
    # Q+ = -2 R P with P = -i d/dX
    f = two_body_packet(np.random.default_rng(12), pair)
    for form in ("exact", "sum"):
        g = two_particle_generators(pair, form)
        for i in range(3):
            ref = f.deriv(i) * (2j * pair.R)
            assert relative_distance(g[f"Qp{i + 1}"](f), ref, ref=f) <= 1e-12


def test_exact_generators_close_the_algebra(pair):
    f = two_body_packet(np.random.default_rng(13), pair)
    reps = two_particle_generators(pair, "exact").algebra_sweep([f])
    assert len(reps) == 45
    assert max(r.max for r in reps) <= 1e-10


def test_slow_form_is_only_approximate(pair):
    g = two_particle_generators(pair, "slow")
    assert g.approximate
    f = two_body_packet(np.random.default_rng(14), pair)
    assert max(r.max for r in g.algebra_sweep([f])) > 1e-3
    with pytest.raises(ValueError):
        g.casimir(f)


def test_unknown_generator_form(pair):
    with pytest.raises(ValueError):
        two_particle_generators(pair, "fast")


# --- mass operators -----------------------------------------------------------

def test_ds_mass_squared_equals_casimir_form(pair):
    rng = np.random.default_rng(15)
    P = np.array([0.4, -0.3, 0.9])
    coef = np.zeros((1, 1, 1, 2, 2, 2), complex)
    coef[0, 0, 0] = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    f = PolyGaussian(coef, np.r_[0, 0, 0, [0.8] * 3], np.r_[1j * P, 0.1 * rng.standard_normal(3)])
    lhs = two_particle_generators(pair, "exact").mass_dS_squared(f)
    rhs = mass_squared_apply(f, pair, P, de_sitter=True, offset=3)
    pts = rng.standard_normal((30, 6))
    assert np.max(np.abs(lhs(pts) - rhs(pts))) <= 1e-10 * np.max(np.abs(rhs(pts)))


def test_power_law_is_first_order_eigenfunction(pair):
    g = make_log_grid(1e-3, 1e3, 1024)
    r = g.nodes
    beta = 3.0
    lam = pair.total_mass + beta / pair.R
    f = GridFunction(g, r ** (1j * beta - 1.5))
    out = build_mass_operator(MassOperatorSpec("first_order", pair, "coordinate"))(f).values
    inner = slice(64, -64)
    assert np.max(np.abs(out - lam * f.values)[inner] / np.abs(f.values[inner])) <= 1e-8 * lam
    sq = mass_squared_apply(State.single(g, f.values, 0, 0), pair).parts[(0, 0)]
    assert np.max(np.abs(sq - lam**2 * f.values)[inner] / np.abs(f.values[inner])) <= 1e-8 * lam**2


def test_mass_squared_changes_sign_at_large_momentum(pair):
    pk = PolyGaussian.gaussian([4.0] * 3, [0, 0, 24.0])
    e1 = expectation(pk, mass_squared_apply(pk, pair, np.array([0, 0, 1.0]))).real
    e10 = expectation(pk, mass_squared_apply(pk, pair, np.array([0, 0, 10.0]))).real
    assert e1 > 0 > e10


def test_g_function_against_independent_quadrature():
    s = SystemParams.two_body(1.0, 2.0, R=10.0)

    def g_ref(k2):
        # dg/dt = sum_j (s_j - m_j) / 2t = sum_j 1 / 2(s_j + m_j), s_j = (m_j^2 + t)^{1/2}
        integrand = lambda t: sum(0.5 / (np.sqrt(m * m + t) + m) for m in (1.0, 2.0))  # noqa: E731
        return quad(integrand, 0, k2, epsabs=0, epsrel=1e-12, limit=200)[0]

    for k in (0.01, 0.3, 3.0, 30.0):
        assert g_function(k * k, s) == pytest.approx(g_ref(k * k), rel=1e-9)
        assert g_function(k * k, s) == pytest.approx(g_function_quadrature(k * k, s), rel=1e-9)


def test_g_function_rejects_negative_argument(pair):
    with pytest.raises(ValueError):
        g_function(-1.0, pair)


def test_relativistic_conjugation():
    s = SystemParams.two_body(1.0, 2.0, R=10.0)
    g = make_log_grid(1e-2, 5.0, 4096)
    k = g.nodes
    f = GridFunction(g, np.exp(-np.log(k) ** 2) * k**-1.5)
    assert relativistic_equivalence_residual(f, s) <= 1e-6


def test_poincare_comparison_shrinks_with_R():
    g = make_log_grid(1e-2, 20.0, 800)
    f = GridFunction(g, np.exp(-(g.nodes - 2) ** 2))
    devs = [poincare_comparison(f, SystemParams.two_body(1.0, 2.0, R=R)).deviation
            for R in (1e2, 1e3, 1e4)]
    assert devs[0] > devs[1] > devs[2]


def test_mass_operator_spec_validation(pair):
    with pytest.raises(ValueError):
        MassOperatorSpec("quartic", pair)
    with pytest.raises(ValueError):
        MassOperatorSpec("dS_exact", pair, "momentum")
    with pytest.raises(ValueError):
        build_mass_operator(MassOperatorSpec("three_body", pair), None)


# --- composition ----------------------------------------------------------------

def test_composition_matches_direct_three_body():
    s3 = SystemParams.from_masses([0.3, 0.5, 0.7], R=10.0)
    g1 = make_log_grid(1e-2, 1e2, 24)
    g2 = make_log_grid(1e-2, 1e2, 24)
    direct = build_mass_operator(MassOperatorSpec("three_body", s3), (g1, g2)).dense()
    p = [particle_mass_operator(m, str(i + 1)) for i, m in enumerate(s3.masses)]
    comp = compose_subsystems(compose_subsystems(p[0], p[1], s3, g1, "k12"), p[2], s3, g2,
                              "K12").dense()
    rng = np.random.default_rng(5)
    for _ in range(3):
        v = np.kron(np.exp(-(g1.rho - rng.normal()) ** 2), np.exp(-(g2.rho - rng.normal()) ** 2))
        assert np.linalg.norm((comp - direct) @ v) <= 1e-8 * np.linalg.norm(direct @ v)
    assert np.allclose(direct, direct.conj().T)
    ev = np.linalg.eigvalsh(direct)
    assert band_symmetry(ev, s3.total_mass) <= 1e-10 * (ev[-1] - ev[0])


def _largest_central_gap(s3, n):
    g = make_log_grid(1e-2, 1e2, n)
    ev = np.linalg.eigvalsh(build_mass_operator(MassOperatorSpec("three_body", s3), (g, g)).dense())
    return np.diff(ev)[ev.size // 4: 3 * ev.size // 4].max()


def test_three_body_band_fills_in_under_refinement():
    # a continuous band: the largest gap in the central half shrinks with the grid
    s3 = SystemParams.from_masses([0.3, 0.5, 0.7], R=10.0)
    gaps = [_largest_central_gap(s3, n) for n in (16, 24, 32)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_composition_rejects_shared_variables():
    s3 = SystemParams.from_masses([0.3, 0.5, 0.7], R=10.0)
    g = make_log_grid(1e-2, 1e2, 16)
    p = [particle_mass_operator(m, str(i + 1)) for i, m in enumerate(s3.masses)]
    inner = compose_subsystems(p[0], p[1], s3, g, "k12")
    with pytest.raises(ValueError):
        compose_subsystems(inner, inner, s3, g, "K12")
