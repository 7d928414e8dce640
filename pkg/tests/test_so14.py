"""Principal-series generators: angular algebra, commutators, Casimir, maps, contraction."""

import numpy as np
import pytest
from scipy.special import roots_legendre, sph_harm_y

from so14lab.numerics.grids import make_log_grid
from so14lab.params import ParticleParams
from so14lab.so14_generators import (INDEX_PAIRS, REALIZATIONS, Realization, State,
                                     UnsupportedGeneratorError, angular_momentum,
                                     build_generator, casimir_apply, casimir_eigenvalue,
                                     commutator_residual, contraction_check, ds_energy_sq_matrix,
                                     intertwiner_check, unit_vector)
from so14lab.so14_generators.angular import unit_vector_coefficients

GRIDS = {
    "velocity_hyperboloid": (1e-3, 12.0, 512, 1.5),
    "sphere": (1e-3, 0.95, 512, 0.15),
    "stereographic": (1e-3, 12.0, 512, 1.5),
}


def packets(tag, rng):
    lo, hi, n, w = GRIDS[tag]
    g = make_log_grid(lo, hi, n)
    r = g.nodes
    c = 0.3 * (rng.standard_normal() + 1j * rng.standard_normal())
    return [State.single(g, r**l * np.exp(-r**2 / (2 * w**2)) * (1 + c * r), l, m)
            for l, m in ((0, 0), (1, 1), (2, -1))]


# --- angular reduction ------------------------------------------------------

def _overlap(L, M, l, m, q):
    """Quadrature of conj(Y_LM) n_q Y_lm over the sphere."""
    x, w = roots_legendre(40)
    theta = np.arccos(x)
    phi = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    st, ct = np.sin(T), np.cos(T)
    nq = {1: -st * np.exp(1j * P) / np.sqrt(2), 0: ct, -1: st * np.exp(-1j * P) / np.sqrt(2)}[q]
    f = np.conj(sph_harm_y(L, M, T, P)) * nq * sph_harm_y(l, m, T, P)
    return np.sum(w[:, None] * f) * (2 * np.pi / phi.size)


@pytest.mark.parametrize("l", [0, 1, 2, 3])
@pytest.mark.parametrize("q", [-1, 0, 1])
def test_unit_vector_coefficients_match_quadrature(l, q):
    for m in range(-l, l + 1):
        coeffs = {(L, M): c for L, M, c in unit_vector_coefficients(l, m, q)}
        for L in (l - 1, l + 1):
            M = m + q
            if L < 0 or abs(M) > L:
                continue
            assert coeffs.get((L, M), 0.0) == pytest.approx(_overlap(L, M, l, m, q), abs=1e-12)


def test_angular_momentum_algebra_is_exact():
    g = make_log_grid(0.1, 2.0, 16)
    rng = np.random.default_rng(1)
    f = State(g, {(l, m): rng.standard_normal(16) + 1j * rng.standard_normal(16)
                  for l in range(3) for m in range(-l, l + 1)})
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        lhs = angular_momentum(angular_momentum(f, b), a) - angular_momentum(angular_momentum(f, a), b)
        d = lhs - angular_momentum(f, c) * 1j
        ones = np.ones(16)  # purely algebraic identity: plain Euclidean norm
        assert d.norm(ones) <= 1e-13 * f.norm(ones)


def test_unit_vector_squares_to_one():
    g = make_log_grid(0.1, 2.0, 16)
    f = State.single(g, np.linspace(1, 2, 16), 2, 1)
    sq = unit_vector(unit_vector(f, 0), 0)
    for i in (1, 2):
        sq = sq + unit_vector(unit_vector(f, i), i)
    ones = np.ones(16)
    assert (sq - f).norm(ones) <= 1e-13 * f.norm(ones)


# --- generators ---------------------------------------------------------------

def test_casimir_eigenvalue_formula():
    for mu in (0.0, 1.0, 2.0, 5.0):
        assert casimir_eigenvalue(mu) == pytest.approx(2 * (mu**2 + 9 / 4))


@pytest.mark.parametrize("tag", REALIZATIONS)
def test_selected_commutators(tag):
    real = Realization(tag, ParticleParams(mu=2.0, R=10.0))
    tests = packets(tag, np.random.default_rng(7))
    for a, b in (((0, 1), (0, 2)), ((0, 4), (1, 4)), ((1, 2), (0, 3)), ((0, 1), (1, 4))):
        assert commutator_residual(real, a, b, tests).max <= 1e-5


@pytest.mark.parametrize("tag", REALIZATIONS)
@pytest.mark.parametrize("mu", [0.0, 2.0])
def test_casimir_constant(tag, mu):
    real = Realization(tag, ParticleParams(mu=mu, R=10.0))
    f = packets(tag, np.random.default_rng(3))[1]
    _, chk = casimir_apply(real, f)
    assert chk.expected == pytest.approx(2 * (mu**2 + 9 / 4))
    assert chk.residual <= 1e-5
    assert chk.rayleigh.real == pytest.approx(chk.expected, rel=1e-5)


def test_index_pairs_count():
    assert len(INDEX_PAIRS) == 10
    assert len({(p, q) for i, p in enumerate(INDEX_PAIRS) for q in INDEX_PAIRS[i + 1:]}) == 45


def test_light_cone_generators_only_in_stereographic():
    pp = ParticleParams(mu=1.0, R=10.0)
    with pytest.raises(UnsupportedGeneratorError):
        build_generator(Realization("velocity_hyperboloid", pp), "Qp1")
    build_generator(Realization("stereographic", pp), "Qp1")


def test_realization_validation():
    pp = ParticleParams(mu=1.0)
    with pytest.raises(ValueError):
        Realization("torus", pp)
    with pytest.raises(ValueError):
        Realization("sphere", pp, hemisphere=0)
    with pytest.raises(ValueError):
        build_generator(Realization("sphere", pp), "X1")
    with pytest.raises(ValueError):
        ParticleParams(mu=1.0, spin=1)
    with pytest.raises(ValueError):
        ParticleParams(mu=1.0, R=-1.0)


def test_sphere_needs_unit_ball():
    real = Realization("sphere", ParticleParams(mu=1.0, R=10.0))
    g = make_log_grid(1e-2, 1.5, 64)
    f = State.single(g, np.exp(-g.nodes**2), 0, 0)
    with pytest.raises(ValueError):
        build_generator(real, "N1").apply(f)


# --- maps, energy and contraction --------------------------------------------

def _map_packet():
    g = make_log_grid(1e-3, 12.0, 1024)
    r = g.nodes
    return (State.single(g, r * np.exp(-r**2 / 4.5) * (1 + 0.2j * r), 1, 1)
            + State.single(g, np.exp(-r**2 / 4.5), 0, 0))


def test_intertwiner_norm_and_conjugation():
    chk = intertwiner_check(_map_packet(), ParticleParams(mu=2.0, R=10.0),
                            ("M1", "N1", "N3", "B2", "L04"))
    assert abs(chk.norm_ratio - 1) <= 1e-8
    assert max(chk.residuals.values()) <= 1e-5


def test_intertwiner_half_phase_fails():
    # the half-angle phase coefficient does not intertwine the boosts
    chk = intertwiner_check(_map_packet(), ParticleParams(mu=2.0, R=10.0), ("N1", "L04"),
                            phase_coef=0.5)
    assert max(chk.residuals.values()) > 1e-2


def test_ds_energy_square_is_positive_semidefinite():
    real = Realization("velocity_hyperboloid", ParticleParams(mu=2.0, R=10.0))
    g = make_log_grid(1e-2, 8.0, 160)
    for l in (0, 1):
        A = ds_energy_sq_matrix(real, g, l)
        assert np.allclose(A, A.conj().T)
        ev = np.linalg.eigvalsh(A)
        assert ev[0] >= -1e-10 * np.max(np.abs(ev))


def test_contraction_rates():
    g = make_log_grid(1e-3, 12.0, 512)
    r = g.nodes
    f = (State.single(g, np.exp(-r**2 / 2) * (1 + 0.2j * r), 0, 0)
         + State.single(g, r * np.exp(-r**2 / 2), 1, 1))
    rep = contraction_check(1.0, (1e2, 1e3, 1e4), f)
    for name, slope in rep.slopes.items():
        # O(1/R) within a factor of two
        assert slope <= -0.5, name
        assert np.all(np.diff(rep.residuals[name]) < 0), name
