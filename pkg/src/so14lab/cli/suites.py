"""Verification suites run by ``so14lab verify``.

Each suite is a list of independent case groups.  Groups run on a thread
pool and their cases are collected in declaration order, so the report
does not depend on scheduling.  Grids and test packets are fixed per check
and listed in the README; ``R``, the masses and the potential come from the
run configuration where a check is meant to follow them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..many_body import (MassOperatorSpec, PolyGaussian, additivity_residual, band_symmetry,
                         build_mass_operator, compose_subsystems, expectation,
                         from_center_of_mass, from_jacobi,
                         g_function, g_function_quadrature, mass_squared_apply,
                         particle_mass_operator, relativistic_equivalence_residual,
                         to_center_of_mass, to_jacobi, two_particle_generators)
from ..numerics.grids import GridFunction, concat_grids, make_linear_grid, make_log_grid
from ..numerics.hankel import hankel_transform
from ..params import ParticleParams, SystemParams
from ..so14_generators import (REALIZATIONS, Realization, State, algebra_sweep, casimir_apply,
                               casimir_eigenvalue, contraction_check, intertwiner_check)
from ..spectral import (EigenPacketWeights, PotentialSpec, build_intertwiner_U,
                        chirp_resolving_grid, discretize_m0, discretize_nr_coordinate,
                        discretize_nr_momentum, eigenfunction_closed_form, family_matrix,
                        fit_large_r, fit_power_law, free_eigenfunction_momentum,
                        galilean_spectrum, lambda_grid, nr_equivalence_residual,
                        smeared_overlap, solve_radial_batch, synthesize, wave_operator_sweep)
from . import report as rp
from .config import RunConfig

SUITES = ("algebra", "casimir", "intertwiners", "mass_free", "spectral_free",
          "spectral_interacting", "equivalence", "galilean", "wave_operators")

TOLERANCES = {
    "algebra": {"commutator": 1e-5},
    "casimir": {"casimir": 1e-5, "agreement": 1e-5},
    "intertwiners": {"norm": 1e-8, "conjugation": 1e-5, "contraction_rate": 2.0},
    "mass_free": {"round_trip": 1e-12, "additivity": 1e-10, "algebra": 1e-10,
                  "casimir_identity": 1e-10, "first_order": 1e-8, "g_closed_form": 1e-12,
                  "composition": 1e-8, "band": 1e-8},
    "spectral_free": {"triangle": 1e-4, "exponent": 0.05, "phase_slope": 0.01,
                      "normalization": 1e-3},
    "spectral_interacting": {"exponent": 0.05, "phase_slope": 0.01, "normalization": 1e-3},
    "equivalence": {"spectrum": 1e-12, "nr_conjugation": 1e-6, "relativistic_conjugation": 1e-6},
    "galilean": {"bound_energy": 0.02, "unitarity": 1e-3, "conjugation": 1e-3},
    "wave_operators": {"norm": 1e-12, "jitter": 0.1},
}

REF = {
    "commutator": "de Sitter commutation relations, {} generators",
    "casimir": "quadratic Casimir of the spinless principal series, {} generators",
    "casimir_agree": "quadratic Casimir is realization independent",
    "intertwiner_norm": "velocity-to-sphere map preserves the invariant norm",
    "intertwiner_conj": "velocity-to-sphere map intertwines the generators",
    "contraction": "Poincare contraction of the generators for large R",
    "round_trip": "Jacobi and centre-of-mass variables are invertible",
    "additivity": "two-particle generators equal the sum of one-particle generators",
    "algebra2": "two-particle generators satisfy the de Sitter algebra",
    "slow": "small-velocity two-particle generators (approximate, reported only)",
    "dS_mass": "de Sitter mass squared from the Casimir at fixed total momentum",
    "first_order": "free first-order mass operator on its power-law eigenfunctions",
    "sign": "mass squared expectation changes sign with total momentum",
    "g": "relativistic equivalence phase g(k^2) closed form",
    "compose": "three-body mass operator from nested two-body composition",
    "band": "three-body spectrum is a band symmetric about the mass sum",
    "triangle": "free continuum eigenfunction: closed form, Hankel quadrature, radial ODE",
    "small_r": "regular small-r behaviour r^l of continuum eigenfunctions",
    "envelope": "universal large-r envelope r^(-3/2) of continuum eigenfunctions",
    "phase": "large-r log-phase slope R * lambda of continuum eigenfunctions",
    "norm_free": "delta normalization of free eigenfunction families",
    "norm_int": "delta normalization of interacting eigenfunction families",
    "spectra": "grid-level unitary equivalence of M_0 and M_nr",
    "nr_conj": "M_nr = exp(i phi) M_0 exp(-i phi) on packets",
    "rel_conj": "relativistic mass operator as a phase conjugate of the first-order operator",
    "bound": "Galilean two-body operator with Coulomb binding",
    "no_bound": "cosmological dilation term removes localized states",
    "U_unitary": "interacting intertwiner is unitary on band-limited packets",
    "U_conj": "interacting intertwiner conjugates M_nr into M_hat_nr",
    "wave_norm": "wave operator W(t) preserves the norm",
    "wave_cauchy": "wave operator W(t) f converges as t grows",
}


@dataclass
class SuiteOutput:
    cases: list
    plots: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _run_groups(groups, jobs: int) -> SuiteOutput:
    if jobs > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            outs = list(ex.map(lambda g: g(), groups))
    else:
        outs = [g() for g in groups]
    cases, plots, extra = [], [], {}
    for o in outs:
        cases.extend(o.cases)
        plots.extend(o.plots)
        extra.update(o.extra)
    return SuiteOutput(cases, plots, extra)


def _rng(cfg: RunConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


def _spectral_params(cfg: RunConfig) -> SystemParams:
    m = cfg.masses
    return SystemParams.two_body(m[0], m[1], R=cfg.R)


# --- algebra and Casimir ------------------------------------------------------

ALGEBRA_GRIDS = {
    "velocity_hyperboloid": ((1e-3, 12.0, 512), 1.5),
    "sphere": ((1e-3, 0.95, 512), 0.15),
    "stereographic": ((1e-3, 12.0, 512), 1.5),
}
ALGEBRA_MU = 2.0


def seeded_packets(tag: str, rng: np.random.Generator, count: int = 3) -> list:
    """Seeded smooth Gaussian packets in partial waves (0,0), (1,1), (2,-1)."""
    (lo, hi, n), width = ALGEBRA_GRIDS[tag]
    g = make_log_grid(lo, hi, n)
    r = g.nodes
    out = []
    for l, m in ((0, 0), (1, 1), (2, -1))[:count]:
        w = width * (1 + 0.1 * rng.uniform(-1, 1))
        c = 0.3 * (rng.standard_normal() + 1j * rng.standard_normal())
        out.append(State.single(g, r**l * np.exp(-r**2 / (2 * w**2)) * (1 + c * r), l, m))
    return out


def _pair_name(pair):
    (a, b), (c, d) = pair
    return f"[L{a}{b},L{c}{d}]"


def suite_algebra(cfg: RunConfig) -> SuiteOutput:
    tol = cfg.tolerance("algebra", "commutator", TOLERANCES["algebra"]["commutator"])
    pp = ParticleParams(mu=ALGEBRA_MU, R=cfg.R)

    def group(k, tag):
        def run():
            tests = seeded_packets(tag, _rng(cfg, 100 + k))
            reps = algebra_sweep(Realization(tag, pp), tests)
            cases = [rp.le(f"{tag}:{_pair_name(r.pair)}", REF["commutator"].format(tag), r.max, tol)
                     for r in reps]
            plot = rp.PlotData(f"algebra_{tag}", {"pair": np.arange(len(reps)),
                                                  "residual": [r.max for r in reps]},
                               f"commutator residuals ({tag})", "pair", ("residual",), logy=True,
                               kind="scatter")
            return SuiteOutput(cases, [plot])
        return run

    return _run_groups([group(k, t) for k, t in enumerate(REALIZATIONS)], cfg.jobs)


def suite_casimir(cfg: RunConfig) -> SuiteOutput:
    tol = cfg.tolerance("casimir", "casimir", TOLERANCES["casimir"]["casimir"])
    tol_agree = cfg.tolerance("casimir", "agreement", TOLERANCES["casimir"]["agreement"])
    mus = [float(m) for m in cfg.data["casimir_mu"]]

    def group(j, mu):
        def run():
            cases, vals = [], []
            pp = ParticleParams(mu=mu, R=cfg.R)
            for k, tag in enumerate(REALIZATIONS):
                f = seeded_packets(tag, _rng(cfg, 200 + 10 * j + k), count=1)[0]
                _, chk = casimir_apply(Realization(tag, pp), f)
                vals.append(chk.rayleigh.real)
                cases.append(rp.le(f"mu={mu:g}:{tag}", REF["casimir"].format(tag), chk.residual,
                                   tol, value=chk.rayleigh.real))
            expected = casimir_eigenvalue(mu)
            spread = (max(vals) - min(vals)) / expected
            cases.append(rp.le(f"mu={mu:g}:agreement", REF["casimir_agree"], spread, tol_agree,
                               value=expected))
            return SuiteOutput(cases, extra={f"mu={mu:g}": vals})
        return run

    out = _run_groups([group(j, mu) for j, mu in enumerate(mus)], cfg.jobs)
    cols = {"mu": mus, "expected": [casimir_eigenvalue(m) for m in mus]}
    for k, tag in enumerate(REALIZATIONS):
        cols[tag] = [out.extra[f"mu={m:g}"][k] for m in mus]
    out.plots.append(rp.PlotData("casimir", cols, "Casimir eigenvalue 2(mu^2 + 9/4)", "mu",
                                 ("expected",) + REALIZATIONS, kind="scatter"))
    out.extra = {}
    return out


# --- intertwiners and contraction --------------------------------------------

CONTRACTION_R = (1e2, 1e3, 1e4)


def suite_intertwiners(cfg: RunConfig) -> SuiteOutput:
    t = TOLERANCES["intertwiners"]
    tol_norm = cfg.tolerance("intertwiners", "norm", t["norm"])
    tol_conj = cfg.tolerance("intertwiners", "conjugation", t["conjugation"])
    factor = cfg.tolerance("intertwiners", "contraction_rate", t["contraction_rate"])

    def maps():
        pp = ParticleParams(mu=ALGEBRA_MU, R=cfg.R)
        g = make_log_grid(1e-3, 12.0, 1024)
        r = g.nodes
        rng = _rng(cfg, 300)
        c = 0.3 * (rng.standard_normal() + 1j * rng.standard_normal())
        f = State.single(g, r * np.exp(-r**2 / 4.5) * (1 + c * r), 1, 1) \
            + State.single(g, np.exp(-r**2 / 4.5), 0, 0)
        labels = [f"{k}{i}" for k in "MNB" for i in (1, 2, 3)] + ["L04"]
        chk = intertwiner_check(f, pp, labels)
        cases = [rp.le("norm_ratio", REF["intertwiner_norm"], abs(chk.norm_ratio - 1), tol_norm,
                       value=chk.norm_ratio)]
        cases += [rp.le(f"conjugation:{lab}", REF["intertwiner_conj"], chk.residuals[lab], tol_conj)
                  for lab in labels]
        return SuiteOutput(cases)

    def contraction():
        g = make_log_grid(1e-3, 12.0, 512)
        r = g.nodes
        f = State.single(g, np.exp(-r**2 / 2) * (1 + 0.2j * r), 0, 0) \
            + State.single(g, r * np.exp(-r**2 / 2), 1, 1)
        rep = contraction_check(1.0, CONTRACTION_R, f)
        cases = []
        for name, slope in rep.slopes.items():
            # O(1/R): the fitted slope must reach -1/factor; leading-order terms
            # fall as 1/R (slope within a factor of -1), the pole B term as 1/R^2
            cases.append(rp.Case(f"contraction:{name}", REF["contraction"],
                                 residual=float(rep.residuals[name][-1]), tolerance=-1.0 / factor,
                                 rule="below", value=slope))
        cols = {"R": rep.R, **{k: v for k, v in rep.residuals.items()}}
        plot = rp.PlotData("contraction", cols, "Poincare contraction residuals", "R",
                           tuple(rep.residuals), logx=True, logy=True)
        return SuiteOutput(cases, [plot])

    return _run_groups([maps, contraction], cfg.jobs)


# --- free many-body checks ----------------------------------------------------

MB_MASSES = (0.3, 0.7)


def _two_body_tests(rng, s: SystemParams, degree=1):
    a1, a2 = s.masses / s.total_mass
    c = 1.3
    A = np.r_[[1 / (a2 * c) + 1 / (a1 * c)] * 3, [a2**2 / (a2 * c) + a1**2 / (a1 * c)] * 3]
    b = 0.2 * rng.standard_normal(6) + 0.1j * rng.standard_normal(6)
    return [PolyGaussian.random(rng, A, b, degree=degree)]


def suite_mass_free(cfg: RunConfig) -> SuiteOutput:
    t = {k: cfg.tolerance("mass_free", k, v) for k, v in TOLERANCES["mass_free"].items()}
    s = SystemParams.two_body(*MB_MASSES, R=cfg.R)

    def kinematics():
        rng = _rng(cfg, 400)
        cases = []
        for masses in (MB_MASSES, (0.3, 0.5, 0.7)):
            sp = SystemParams.from_masses(list(masses), R=cfg.R)
            p = rng.standard_normal((len(masses), 16, 3))
            back = from_jacobi(to_jacobi(p, sp))
            cases.append(rp.le(f"jacobi_round_trip:{len(masses)}", REF["round_trip"],
                               np.max(np.abs(back - p)) / np.max(np.abs(p)), t["round_trip"]))
        x = rng.standard_normal((2, 16, 3))
        back = from_center_of_mass(*to_center_of_mass(x, s), s)
        cases.append(rp.le("center_of_mass_round_trip", REF["round_trip"],
                           np.max(np.abs(back - x)) / np.max(np.abs(x)), t["round_trip"]))
        return SuiteOutput(cases)

    def generators():
        tests = _two_body_tests(_rng(cfg, 401), s)
        add = additivity_residual(s, tests)
        cases = [rp.le(f"additivity:{lab}", REF["additivity"], v, t["additivity"])
                 for lab, v in add.items()]
        ex = two_particle_generators(s, "exact")
        cases += [rp.le(f"algebra:{_pair_name(r.pair)}", REF["algebra2"], r.max, t["algebra"])
                  for r in ex.algebra_sweep(tests)]
        slow = two_particle_generators(s, "slow")
        worst = max(slow.algebra_sweep(tests), key=lambda r: r.max)
        cases.append(rp.info("slow_form:worst_commutator", REF["slow"],
                             value=_pair_name(worst.pair), residual=worst.max))
        return SuiteOutput(cases)

    def mass_squared():
        rng = _rng(cfg, 402)
        ex = two_particle_generators(s, "exact")
        pts = rng.standard_normal((40, 6))
        P = np.array([0.4, -0.3, 0.9])
        a = np.r_[0, 0, 0, [0.8] * 3]
        b = np.r_[1j * P, 0.1 * rng.standard_normal(3)]
        coef = np.zeros((1, 1, 1, 2, 2, 2), complex)
        coef[0, 0, 0] = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        f = PolyGaussian(coef, a, b)
        lhs = ex.mass_dS_squared(f)
        rhs = mass_squared_apply(f, s, P, de_sitter=True, offset=3)
        d = np.max(np.abs(lhs(pts) - rhs(pts))) / np.max(np.abs(rhs(pts)))
        cases = [rp.le("dS_mass_squared_vs_casimir", REF["dS_mass"], d, t["casimir_identity"])]

        # power laws r^{i beta - 3/2} are exact eigenfunctions at P = 0
        g = make_log_grid(1e-3, 1e3, 1024)
        r = g.nodes
        inner = slice(64, -64)
        beta = 3.0
        lam = s.total_mass + beta / s.R
        st = State.single(g, r ** (1j * beta - 1.5), 0, 0)
        fo = build_mass_operator(MassOperatorSpec("first_order", s, "coordinate"))
        v1 = fo(GridFunction(g, st.parts[(0, 0)])).values
        v2 = mass_squared_apply(st, s).parts[(0, 0)]
        ref = st.parts[(0, 0)]
        d1 = np.max(np.abs(v1 - lam * ref)[inner] / np.abs(ref[inner])) / lam
        d2 = np.max(np.abs(v2 - lam**2 * ref)[inner] / np.abs(ref[inner])) / lam**2
        cases.append(rp.le("first_order_eigenvalue", REF["first_order"], d1, t["first_order"],
                           value=lam))
        cases.append(rp.le("mass_squared_at_rest", REF["first_order"], d2, t["first_order"],
                           value=lam**2))

        pk = PolyGaussian.gaussian([4.0] * 3, [0, 0, 24.0])
        e = [expectation(pk, mass_squared_apply(pk, s, np.array([0, 0, Pz]))).real
             for Pz in (1.0, 10.0)]
        cases.append(rp.ge("sign_change:P=1", REF["sign"], e[0], 0.0))
        cases.append(rp.Case("sign_change:P=10", REF["sign"], None, 0.0, "below", e[1]))
        return SuiteOutput(cases)

    def phase():
        s2 = SystemParams.two_body(1.0, 2.0, R=cfg.R)
        ks = (0.01, 0.3, 3.0, 30.0)
        d = max(abs(g_function(k * k, s2) - g_function_quadrature(k * k, s2))
                / g_function_quadrature(k * k, s2) for k in ks)
        return SuiteOutput([rp.le("g_closed_form_vs_quadrature", REF["g"], d, t["g_closed_form"])])

    def three_body():
        s3 = SystemParams.from_masses([0.3, 0.5, 0.7], R=cfg.R)
        g1 = make_log_grid(1e-2, 1e2, 32)
        g2 = make_log_grid(1e-2, 1e2, 32)
        direct = build_mass_operator(MassOperatorSpec("three_body", s3), (g1, g2)).dense()
        p = [particle_mass_operator(m, str(i + 1)) for i, m in enumerate(s3.masses)]
        comp = compose_subsystems(compose_subsystems(p[0], p[1], s3, g1, "k12"), p[2], s3, g2,
                                  "K12").dense()
        rng = _rng(cfg, 403)
        worst = 0.0
        for _ in range(3):
            a = np.exp(-(g1.rho - rng.normal()) ** 2) * (1 + 0.3j * rng.normal() * g1.rho)
            b = np.exp(-(g2.rho - rng.normal()) ** 2)
            v = np.kron(a, b)
            worst = max(worst, np.linalg.norm((comp - direct) @ v) / np.linalg.norm(direct @ v))
        ev = np.linalg.eigvalsh(direct)
        sym = band_symmetry(ev, s3.total_mass) / (ev[-1] - ev[0])
        cases = [rp.le("composition_vs_direct", REF["compose"], worst, t["composition"]),
                 rp.le("band_symmetry", REF["band"], sym, t["band"], value=[ev[0], ev[-1]])]
        plot = rp.PlotData("three_body_band", {"index": np.arange(ev.size), "eigenvalue": ev},
                           "three-body mass spectrum", "index", ("eigenvalue",))
        return SuiteOutput(cases, [plot])

    return _run_groups([kinematics, generators, mass_squared, phase, three_body], cfg.jobs)


# --- continuum eigenfunctions -------------------------------------------------

TRIANGLE_PAIRS = ((0.0, 0), (0.3, 1), (1.0, 3), (-0.5, 0), (1.5, 1))
LAW_LAMBDAS = (-1.0, 0.5, 1.0)


def _triangle(cfg: RunConfig, tol: float) -> SuiteOutput:
    p = _spectral_params(cfg)
    kg = concat_grids(make_log_grid(1e-7, 0.5, 1600), make_linear_grid(0.5, 12.0, 6000))
    g = make_log_grid(1e-3, 120.0, 600)
    r = g.nodes
    mid = (r > 0.05) & (r < 3.0)
    rg = make_log_grid(r[mid][0], r[mid][-1], int(mid.sum()))
    cases, cols = [], {"r": r[mid]}
    for lam, l in TRIANGLE_PAIRS:
        closed = eigenfunction_closed_form(lam, l, p, r)[mid]
        F = GridFunction(kg, free_eigenfunction_momentum(lam, l, p, kg.nodes), l=l)
        quad = hankel_transform(F, rg).values
        ode = solve_radial_batch(PotentialSpec.none(), [lam], l, p, g)[0].values[mid]
        sc = np.max(np.abs(closed))
        for name, x, y in (("closed-quadrature", closed, quad), ("closed-ode", closed, ode),
                           ("quadrature-ode", quad, ode)):
            cases.append(rp.le(f"triangle:lam={lam:g},l={l}:{name}", REF["triangle"],
                               np.max(np.abs(x - y)) / sc, tol))
        cols[f"abs_closed_lam={lam:g}_l={l}"] = np.abs(closed)
    plot = rp.PlotData("triangle", cols, "free continuum eigenfunctions |phi|", "r",
                       tuple(k for k in cols if k != "r"), logx=True, logy=True)
    return SuiteOutput(cases, [plot])


def _laws(cfg: RunConfig, V: PotentialSpec, suite: str) -> SuiteOutput:
    tol_e = cfg.tolerance(suite, "exponent", TOLERANCES[suite]["exponent"])
    tol_p = cfg.tolerance(suite, "phase_slope", TOLERANCES[suite]["phase_slope"])
    p = _spectral_params(cfg)
    g = make_log_grid(1e-3, 300.0, 800)
    r = g.nodes
    small = r < 1e-2
    cases = []
    name = V.describe()
    cols = {"r": r}
    for l in (0, 1):
        for s in solve_radial_batch(V, list(LAW_LAMBDAS), l, p, g):
            tag = f"{name}:lam={s.lam:g},l={l}"
            cases.append(rp.within(f"small_r_exponent:{tag}", REF["small_r"],
                                   fit_power_law(r[small], s.values[small]), l, tol_e))
            fit = fit_large_r(s.meta["far_r"], s.meta["far_values"], p, V, s.lam)
            cases.append(rp.within(f"envelope_exponent:{tag}", REF["envelope"], fit.exponent,
                                   -1.5, tol_e))
            cases.append(rp.within(f"phase_slope:{tag}", REF["phase"], fit.log_slope,
                                   p.R * s.lam, tol_p, relative=True))
            if l == 0:
                cols[f"abs_psi_r15_lam={s.lam:g}"] = np.abs(s.values) * r**1.5
    plot = rp.PlotData(f"envelope_{V.kind}", cols, f"|psi| r^(3/2), {name}", "r",
                       tuple(k for k in cols if k != "r"), logx=True)
    return SuiteOutput(cases, [plot])


def _normalization(cfg: RunConfig, family, suite: str, ref: str) -> SuiteOutput:
    tol = cfg.tolerance(suite, "normalization", TOLERANCES[suite]["normalization"])
    p = _spectral_params(cfg)
    sig = 0.4
    if family in ("free_coordinate", "free_momentum"):
        g = make_log_grid(1e-2, 1e2, 800)
        lam0 = p.total_mass + 0.5 if family == "free_coordinate" else 0.5
        step = sig / 16
    else:
        g = make_log_grid(1e-3, 250.0, 1000)
        lam0, step = 0.5, sig / 8
    lg = lambda_grid(lam0, sig, step, width=14)
    phis = family_matrix(family, lg, 0, p, g)
    a = EigenPacketWeights.gaussian(lam0, sig, lg)
    name = family if isinstance(family, str) else family.describe()
    cases = []
    for shift in (0.0, 0.5 * sig, 5 * sig):
        b = EigenPacketWeights.gaussian(lam0 + shift, sig, lg)
        res = smeared_overlap(a, b, family, p, g, phis=phis)
        cases.append(rp.le(f"normalization:{name}:shift={shift:g}", ref, res.relative_error, tol,
                           value=abs(res.predicted)))
    return SuiteOutput(cases)


def suite_spectral_free(cfg: RunConfig) -> SuiteOutput:
    tol = cfg.tolerance("spectral_free", "triangle", TOLERANCES["spectral_free"]["triangle"])
    groups = [lambda: _triangle(cfg, tol),
              lambda: _laws(cfg, PotentialSpec.none(), "spectral_free")]
    groups += [lambda fam=fam: _normalization(cfg, fam, "spectral_free", REF["norm_free"])
               for fam in ("free_coordinate", "free_momentum", PotentialSpec.none())]
    return _run_groups(groups, cfg.jobs)


def _interacting_potentials(cfg: RunConfig) -> list:
    pots = [PotentialSpec.coulomb(0.2), PotentialSpec.yukawa(0.5, 2.0), PotentialSpec.linear(1e-3)]
    V = cfg.potential()
    if V is not None and V.describe() not in [q.describe() for q in pots]:
        pots.append(V)
    return pots


def suite_spectral_interacting(cfg: RunConfig) -> SuiteOutput:
    pots = _interacting_potentials(cfg)
    groups = [lambda V=V: _laws(cfg, V, "spectral_interacting") for V in pots]
    groups += [lambda V=V: _normalization(cfg, V, "spectral_interacting", REF["norm_int"])
               for V in pots if V.kind != "linear"]
    return _run_groups(groups, cfg.jobs)


# --- grid-level equivalences --------------------------------------------------

def suite_equivalence(cfg: RunConfig) -> SuiteOutput:
    t = {k: cfg.tolerance("equivalence", k, v) for k, v in TOLERANCES["equivalence"].items()}
    p = _spectral_params(cfg)

    def spectra():
        gr = cfg.grid
        g = make_log_grid(gr["r_min"], gr["r_max"], gr["n"])
        a = discretize_m0(g, p).eigenvalues
        b = discretize_nr_momentum(g, p).eigenvalues
        d = float(np.max(np.abs(a - b)))
        plot = rp.PlotData("equivalence_spectra", {"index": np.arange(a.size), "M0": a, "M_nr": b},
                           "sorted spectra of M_0 and M_nr", "index", ("M0", "M_nr"))
        return SuiteOutput([rp.le(f"sorted_spectra:n={g.n}", REF["spectra"], d, t["spectrum"])],
                           [plot])

    def nr():
        g = make_log_grid(1e-2, 10.0, 4000)
        f = GridFunction(g, np.exp(-(g.nodes - 1) ** 2 / 0.1))
        return SuiteOutput([rp.le("nr_conjugation", REF["nr_conj"], nr_equivalence_residual(f, p),
                                  t["nr_conjugation"])])

    def relativistic():
        s2 = SystemParams.two_body(1.0, 2.0, R=cfg.R)
        g = make_log_grid(1e-2, 5.0, 4096)
        k = g.nodes
        f = GridFunction(g, np.exp(-np.log(k) ** 2) * k**-1.5)
        return SuiteOutput([rp.le("relativistic_conjugation", REF["rel_conj"],
                                  relativistic_equivalence_residual(f, s2),
                                  t["relativistic_conjugation"])])

    return _run_groups([spectra, nr, relativistic], cfg.jobs)


def suite_galilean(cfg: RunConfig) -> SuiteOutput:
    t = {k: cfg.tolerance("galilean", k, v) for k, v in TOLERANCES["galilean"].items()}
    p = _spectral_params(cfg)
    V = cfg.potential()
    if V is None or V.kind != "coulomb":
        V = PotentialSpec.coulomb(0.2)

    def dichotomy():
        gl = make_linear_grid(1200 / 1024, 1200.0, 1024)
        s = galilean_spectrum(V, gl, p)
        sc = galilean_spectrum(V, gl, p, cosmological=True)
        exact = -p.m12 * V.alpha**2 / 2
        cases = [rp.ge("galilean:localized_states", REF["bound"], s.n_localized, 1)]
        lowest = float(s.bound_energies[0]) if s.n_localized else float("nan")
        cases.append(rp.within("galilean:lowest_energy", REF["bound"], lowest, exact,
                               t["bound_energy"], relative=True))
        cases.append(rp.Case("cosmological:localized_states", REF["no_bound"], None, 0.0, "below",
                             sc.n_localized))
        plot = rp.PlotData("galilean", {"eigenvalue": s.eigenvalues,
                                        "participation": s.participation,
                                        "eigenvalue_cosmological": sc.eigenvalues,
                                        "participation_cosmological": sc.participation},
                           "participation ratio against eigenvalue", "eigenvalue",
                           ("participation",), logy=True, kind="scatter")
        return SuiteOutput(cases, [plot], {"bound_energies": s.bound_energies.tolist(),
                                           "warnings": s.warnings + sc.warnings})

    def intertwiner():
        sig = 0.4
        lg = lambda_grid(0.5, sig, sig / 8, width=14)
        g = chirp_resolving_grid(p, 250.0)
        U = build_intertwiner_U(V, lg, 0, p, g)
        w = EigenPacketWeights.gaussian(0.5, sig / 2, lg, l=0)
        f = synthesize(w, U._bases(0)[0], g)
        ratio = U.norm_ratio(f)
        return SuiteOutput([
            rp.le("intertwiner:norm_ratio", REF["U_unitary"], abs(ratio - 1), t["unitarity"],
                  value=ratio),
            rp.le("intertwiner:conjugation", REF["U_conj"], U.conjugation_residual(f),
                  t["conjugation"])])

    return _run_groups([dichotomy, intertwiner], cfg.jobs)


def suite_wave_operators(cfg: RunConfig) -> SuiteOutput:
    tol_norm = cfg.tolerance("wave_operators", "norm", TOLERANCES["wave_operators"]["norm"])
    jitter = cfg.tolerance("wave_operators", "jitter", TOLERANCES["wave_operators"]["jitter"])
    p = _spectral_params(cfg)
    V = cfg.potential() or PotentialSpec.coulomb(0.1)
    g = make_log_grid(1e-3, 1e4, 1024)
    A = discretize_nr_coordinate(g, p, 0, None)
    Ah = discretize_nr_coordinate(g, p, 0, V)
    f = GridFunction(g, np.exp(-(g.rho - np.log(3)) ** 2 / (2 * 0.3**2)) * g.nodes**-1.5)
    ts = 3 * np.logspace(0, 1, 8)
    sw = wave_operator_sweep(A, Ah, ts, f)
    c = sw.cauchy
    growth = float(np.max(c[1:] / c[:-1]) - 1)
    cases = [rp.le("norm_preservation", REF["wave_norm"], np.max(np.abs(sw.norm_ratio - 1)),
                   tol_norm),
             rp.Case("cauchy_monotone", REF["wave_cauchy"], growth, jitter, "le",
                     value=c.tolist()),
             rp.Case("cauchy_decay_over_decade", REF["wave_cauchy"], None, 1.0, "below",
                     float(c[-1] / c[0]))]
    plot = rp.PlotData("wave_operator", {"t": ts[1:], "cauchy": c}, "||W(t_j+1) f - W(t_j) f||",
                       "t", ("cauchy",), logx=True, logy=True)
    return SuiteOutput(cases, [plot], {"potential": V.describe()})


RUNNERS = {
    "algebra": suite_algebra,
    "casimir": suite_casimir,
    "intertwiners": suite_intertwiners,
    "mass_free": suite_mass_free,
    "spectral_free": suite_spectral_free,
    "spectral_interacting": suite_spectral_interacting,
    "equivalence": suite_equivalence,
    "galilean": suite_galilean,
    "wave_operators": suite_wave_operators,
}


def run_suite(name: str, cfg: RunConfig) -> rp.VerificationReport:
    """Run one suite (or ``all``) and assemble its report."""
    names = SUITES if name == "all" else (name,)
    cases, plots, extra = [], [], {}
    for n in names:
        out = RUNNERS[n](cfg)
        if name == "all":
            for c in out.cases:
                c.id = f"{n}/{c.id}"
        cases.extend(out.cases)
        plots.extend(out.plots)
        if out.extra:
            extra[n] = out.extra
    env = rp.environment(cfg.data, {"details": extra} if extra else None)
    return rp.VerificationReport(name, cases, env, cfg.seed, plots)
