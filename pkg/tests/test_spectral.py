"""Continuum eigenfunctions, radial solver, discretizations, packets and wave operators."""

import mpmath as mp
import numpy as np
import pytest

from so14lab.numerics.grids import GridFunction, make_linear_grid, make_log_grid
from so14lab.params import SystemParams
from so14lab.spectral import (DiscretizationError, EigenPacketWeights, PotentialSpec,
                              compare_spectra, discretize_m0, discretize_nr_coordinate,
                              discretize_nr_momentum, eigenfunction_asymptotic,
                              eigenfunction_closed_form, family_matrix, fit_large_r,
                              fit_power_law, free_eigenfunction_coordinate,
                              free_eigenfunction_momentum, galilean_spectrum, lambda_grid,
                              nr_coordinate_apply, nr_equivalence_residual, participation_ratio,
                              smeared_overlap, solve_radial_interacting, wave_operator_sweep)
from so14lab.spectral.discrete import DiscreteOperator
from so14lab.spectral.eigenfunctions import cosmological_phase_factor

mp.mp.dps = 30


@pytest.fixture
def p():
    return SystemParams.two_body(0.5, 0.5, R=10.0)


def closed_form_mpmath(lam, l, params, r):
    """The 1F1 closed form evaluated entirely in mpmath."""
    R = mp.mpf(params.R)
    g = mp.sqrt(mp.mpc(0, -params.R / (4 * params.m12)))
    a = mp.mpf(l) / 2 + mp.mpf(3) / 4 - mp.mpc(0, lam * params.R) / 2
    b = mp.mpf(l) + mp.mpf(3) / 2
    z = -mp.mpf(r) ** 2 / (4 * g**2)
    pre = (mp.sqrt(R / (2 * mp.pi * r)) / 2 / mp.gamma(b) * g ** (mp.mpc(0, lam * params.R) - 1)
           * (r / (2 * g)) ** (l + mp.mpf(1) / 2) * mp.gamma(a))
    return complex((-1j) ** l * pre * mp.hyp1f1(a, b, z))


# --- closed forms ---------------------------------------------------------------

@pytest.mark.parametrize("lam,l", [(0.0, 0), (0.3, 1), (1.0, 3), (-0.5, 0), (3.0, 2)])
def test_closed_form_against_mpmath(p, lam, l):
    r = np.array([0.05, 0.7, 3.0, 12.0, 40.0])
    got = eigenfunction_closed_form(lam, l, p, r)
    for ri, gi in zip(r, got):
        ref = closed_form_mpmath(lam, l, p, ri)
        assert abs(gi - ref) <= 1e-9 * abs(ref)


@pytest.mark.parametrize("lam,l", [(0.2, 0), (-0.7, 1), (1.0, 2)])
def test_closed_form_solves_the_radial_equation(p, lam, l):
    g = make_log_grid(0.05, 20.0, 3000)
    f = GridFunction(g, eigenfunction_closed_form(lam, l, p, g.nodes), l=l)
    out = nr_coordinate_apply(f, p).values
    inner = slice(50, -50)
    scale = np.max(np.abs(f.values[inner]))
    assert np.max(np.abs(out - lam * f.values)[inner]) <= 1e-6 * scale * max(1.0, abs(lam))


def test_asymptotic_form_matches_closed_form(p):
    r = np.linspace(60.0, 120.0, 7)
    for lam, l in ((0.5, 0), (-0.3, 1)):
        asym = eigenfunction_asymptotic(lam, l, p, r, terms=8)
        exact = eigenfunction_closed_form(lam, l, p, r)
        assert np.max(np.abs(asym.value - exact) / np.abs(exact)) <= 1e-6
        # both sectors carry equal leading amplitude
        ratio = np.abs(asym.cosmological) / np.abs(asym.chirp)
        assert np.all(np.abs(ratio - 1) < 0.05)


def test_asymptotic_rejects_zero_terms(p):
    with pytest.raises(ValueError):
        eigenfunction_asymptotic(0.1, 0, p, [10.0], terms=0)


def test_cosmological_phase_is_unimodular(p):
    for lam, l in ((0.0, 0), (2.5, 1), (-4.0, 3)):
        assert abs(cosmological_phase_factor(lam, l, p)) == pytest.approx(1.0, abs=1e-13)


def test_first_order_eigenfunction_norm_and_phase(p):
    # 0.1 in ln r keeps the phase step well below pi for unwrapping
    r = 0.5 * np.exp(0.1 * np.arange(30))
    lam = p.total_mass + 0.3
    phi = free_eigenfunction_coordinate(lam, p, r)
    np.testing.assert_allclose(np.abs(phi) * r**1.5, np.sqrt(p.R / (2 * np.pi)), rtol=1e-14)
    slope = np.diff(np.unwrap(np.angle(phi))) / np.diff(np.log(r))
    np.testing.assert_allclose(slope, p.R * 0.3, rtol=1e-12)


def test_momentum_eigenfunction_rejects_nonpositive_k(p):
    with pytest.raises(ValueError):
        free_eigenfunction_momentum(0.1, 0, p, [0.0, 1.0])


# --- radial solver and large-r laws -----------------------------------------------

@pytest.mark.parametrize("V", [PotentialSpec.coulomb(0.2), PotentialSpec.yukawa(0.5, 2.0)])
def test_interacting_solution_laws(p, V):
    g = make_log_grid(1e-3, 300.0, 800)
    r = g.nodes
    lam = 0.5
    for l in (0, 1):
        s = solve_radial_interacting(V, lam, l, p, g)
        small = r < 1e-2
        assert fit_power_law(r[small], s.values[small]) == pytest.approx(l, abs=0.05)
        fit = fit_large_r(s.meta["far_r"], s.meta["far_values"], p, V, lam)
        assert fit.exponent == pytest.approx(-1.5, abs=0.05)
        assert fit.log_slope == pytest.approx(p.R * lam, rel=0.01)


def test_free_ode_matches_closed_form(p):
    g = make_log_grid(1e-3, 120.0, 600)
    r = g.nodes
    mid = (r > 0.05) & (r < 3.0)
    for lam, l in ((0.0, 0), (0.8, 2)):
        s = solve_radial_interacting(PotentialSpec.none(), lam, l, p, g)
        exact = eigenfunction_closed_form(lam, l, p, r)
        assert np.max(np.abs(s.values - exact)[mid]) <= 1e-4 * np.max(np.abs(exact[mid]))


def test_radial_solver_argument_checks(p):
    g = make_log_grid(1e-3, 10.0, 64)
    with pytest.raises(ValueError):
        solve_radial_interacting("coulomb", 0.1, 0, p, g)
    with pytest.raises(ValueError):
        solve_radial_interacting(PotentialSpec.coulomb(0.1), 0.1, -1, p, g)


def test_potential_spec():
    V = PotentialSpec.coulomb(0.2, r_c=0.01)
    assert V(np.array([0.001]))[0] == pytest.approx(V(np.array([0.01]))[0])
    assert V(np.array([2.0]))[0] == pytest.approx(-0.1)
    assert PotentialSpec.linear(0.5)(np.array([4.0]))[0] == pytest.approx(2.0)
    assert PotentialSpec.none().is_free
    for bad in (dict(kind="cubic"), dict(kind="coulomb", r_c=0.0),
                dict(kind="yukawa", range=0.0), dict(kind="linear", slope=np.inf)):
        with pytest.raises(ValueError):
            PotentialSpec(**bad)


# --- discretizations ------------------------------------------------------------

def test_m0_and_mnr_share_the_spectrum(p):
    g = make_log_grid(1e-2, 1e2, 256)
    a = discretize_m0(g, p)
    b = discretize_nr_momentum(g, p)
    assert a.hermiticity_defect() <= 1e-14
    assert np.max(np.abs(a.eigenvalues - b.eigenvalues)) <= 1e-12
    # the dilation spectrum is symmetric about zero
    assert np.max(np.abs(a.eigenvalues + a.eigenvalues[::-1])) <= 1e-12
    st = compare_spectra(a.eigenvalues, b.eigenvalues)
    assert st.counting_distance == 0.0


def test_direct_momentum_form_differs_on_coarse_grid(p):
    g = make_log_grid(1e-2, 1e2, 256)
    a = discretize_m0(g, p).eigenvalues
    d = discretize_nr_momentum(g, p, form="direct").eigenvalues
    assert np.max(np.abs(a - d)) > 1.0
    with pytest.raises(ValueError):
        discretize_nr_momentum(g, p, form="other")


def test_nr_conjugation_residual(p):
    g = make_log_grid(1e-2, 10.0, 4000)
    f = GridFunction(g, np.exp(-(g.nodes - 1) ** 2 / 0.1))
    assert nr_equivalence_residual(f, p) <= 1e-6


def test_coordinate_discretization_is_hermitian(p):
    g = make_log_grid(1e-2, 50.0, 200)
    op = discretize_nr_coordinate(g, p, 1, PotentialSpec.coulomb(0.2))
    assert op.hermiticity_defect() <= 1e-14
    with pytest.raises(ValueError):
        discretize_nr_coordinate(g, p, -1)


def test_non_hermitian_matrix_is_rejected():
    g = make_log_grid(1e-2, 1.0, 16)
    m = np.triu(np.ones((16, 16)))
    with pytest.raises(DiscretizationError):
        DiscreteOperator("upper", g, m).eig


def test_participation_ratio():
    n = 50
    v = np.zeros((n, 2))
    v[3, 0] = 1.0
    v[:, 1] = 1 / np.sqrt(n)
    np.testing.assert_allclose(participation_ratio(v), [1.0, n])


def test_compare_spectra_validates_sizes():
    with pytest.raises(ValueError):
        compare_spectra([1.0, 2.0], [1.0])


# --- bound-state dichotomy --------------------------------------------------------

def test_hydrogen_like_ground_state_without_cosmological_term(p):
    V = PotentialSpec.coulomb(0.2)
    g = make_linear_grid(1200 / 1024, 1200.0, 1024)
    s = galilean_spectrum(V, g, p)
    assert s.n_localized >= 1
    exact = -p.m12 * V.alpha**2 / 2
    assert s.bound_energies[0] == pytest.approx(exact, rel=0.02)
    assert galilean_spectrum(V, g, p, cosmological=True).n_localized == 0


def test_free_galilean_operator_has_no_bound_state(p):
    g = make_linear_grid(600 / 512, 600.0, 512)
    assert galilean_spectrum(PotentialSpec.none(), g, p).n_localized == 0


# --- smeared normalization and wave operators --------------------------------------

def test_smeared_overlap_free_coordinate(p):
    sig = 0.4
    lam0 = p.total_mass + 0.5
    lg = lambda_grid(lam0, sig, sig / 16, width=14)
    g = make_log_grid(1e-2, 1e2, 800)
    phis = family_matrix("free_coordinate", lg, 0, p, g)
    a = EigenPacketWeights.gaussian(lam0, sig, lg)
    for shift in (0.0, 0.2):
        b = EigenPacketWeights.gaussian(lam0 + shift, sig, lg)
        res = smeared_overlap(a, b, "free_coordinate", p, g, phis=phis)
        assert res.relative_error <= 1e-3


def test_packet_weight_validation():
    with pytest.raises(ValueError):
        EigenPacketWeights(np.array([0.0, 0.1, 0.3]), np.ones(3))
    with pytest.raises(ValueError):
        family_matrix("unknown", np.linspace(0, 1, 4), 0,
                      SystemParams.two_body(0.5, 0.5, R=10.0), make_log_grid(0.1, 1.0, 16))


def test_wave_operator_norm_and_cauchy_decay(p):
    g = make_log_grid(1e-3, 1e4, 1024)
    A = discretize_nr_coordinate(g, p, 0, None)
    Ah = discretize_nr_coordinate(g, p, 0, PotentialSpec.coulomb(0.1))
    f = GridFunction(g, np.exp(-(g.rho - np.log(3)) ** 2 / (2 * 0.3**2)) * g.nodes**-1.5)
    sw = wave_operator_sweep(A, Ah, 3 * np.logspace(0, 1, 6), f)
    assert np.max(np.abs(sw.norm_ratio - 1)) <= 1e-12
    assert sw.cauchy[-1] < sw.cauchy[0]
    with pytest.raises(ValueError):
        wave_operator_sweep(A, Ah, [1.0], f)
