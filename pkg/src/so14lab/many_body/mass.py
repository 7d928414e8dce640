"""Free mass operators of two- and three-particle systems.

Radial forms act on :class:`GridFunction` samples by finite differences;
their matrices (``LinearOperatorSpec.dense``) act on the unitary variable
``chi = x^{3/2} f`` of a log grid, where the dilation term
``(i/R)(x d/dx + 3/2)`` becomes ``(i/R) d/d ln x`` and is discretized by
an antisymmetric stencil, so every matrix is Hermitian.

The squared two-particle mass in a sector of fixed total momentum ``P``
(``dS_exact``) acts on multi-wave :class:`State` objects or on
:class:`PolyGaussian` functions of ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ..numerics.grids import GridFunction, RadialGrid, differentiate
from ..operators import LinearOperatorSpec
from ..params import SystemParams
from ..so14_generators.angular import State
from ..so14_generators.generators import calculus
from ..spectral.discrete import (discretize_m0, discretize_nr_coordinate,
                                 discretize_nr_momentum, m0_momentum_apply)
from ..spectral.eigenfunctions import (first_order_mass_apply, nr_coordinate_apply,
                                       nr_momentum_apply)
from .polygauss import PolyGaussian

FORMS = ("first_order", "dS_exact", "relativistic_tilde", "nonrel", "composed", "three_body")
REPRESENTATIONS = {
    "first_order": ("momentum", "coordinate"),
    "dS_exact": ("coordinate",),
    "relativistic_tilde": ("momentum",),
    "nonrel": ("momentum", "coordinate"),
    "composed": ("momentum",),
    "three_body": ("momentum",),
}


@dataclass(frozen=True)
class MassOperatorSpec:
    """Which mass operator to build.

    ``P`` is the total momentum of the sector (``dS_exact`` only);
    ``de_sitter=True`` returns ``M_dS^2 = R^2 M^2`` instead of ``M^2``.
    ``tilde`` selects the square-root forms of the composed and three-body
    operators.  ``subsystems`` holds the two operators to compose.
    """

    form: str
    params: SystemParams
    representation: str = "momentum"
    P: tuple = (0.0, 0.0, 0.0)
    de_sitter: bool = False
    tilde: bool = False
    potential: object = None
    subsystems: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown mass operator form {self.form!r}; expected one of {FORMS}")
        if self.representation not in REPRESENTATIONS[self.form]:
            raise ValueError(f"form {self.form!r} is defined in the "
                             f"{' or '.join(REPRESENTATIONS[self.form])} representation, "
                             f"not {self.representation!r}")
        if len(np.asarray(self.P, dtype=float)) != 3:
            raise ValueError("P must be a 3-vector")


# --- the relativistic phase ---------------------------------------------------

def _check_ksq(k_sq):
    k_sq = np.asarray(k_sq, dtype=float)
    if np.any(k_sq < 0) or not np.all(np.isfinite(k_sq)):
        raise ValueError("k^2 must be finite and nonnegative")
    return k_sq


def g_function(k_sq, params: SystemParams):
    """``g(k^2) = 1/2 sum_j int_0^{k^2} dt / ((m_j^2 + t)^{1/2} + m_j)``.

    With ``s = (m^2 + t)^{1/2}`` each integral is
    ``2[(s - m) - m ln((s + m)/2m)]``; ``s - m`` is evaluated as
    ``t/(s + m)`` to keep full precision for small ``k``.
    """
    k_sq = _check_ksq(k_sq)
    out = np.zeros_like(k_sq)
    for m in params.masses[:2]:
        s = np.sqrt(m * m + k_sq)
        d = k_sq / (s + m)
        out = out + d - m * np.log1p(d / (2 * m))
    return out if out.ndim else float(out)


def g_function_quadrature(k_sq: float, params: SystemParams) -> float:
    """The defining integral by adaptive quadrature (reference values)."""
    k_sq = float(_check_ksq(k_sq))
    m1, m2 = params.masses[:2]
    integrand = lambda t: 0.5 * (1 / (np.sqrt(m1**2 + t) + m1) + 1 / (np.sqrt(m2**2 + t) + m2))  # noqa: E731
    val, _ = integrate.quad(integrand, 0.0, k_sq, epsabs=0.0, epsrel=1e-13, limit=200)
    return float(val)


def equivalence_phase_relativistic(f: GridFunction, params: SystemParams,
                                   inverse: bool = False) -> GridFunction:
    """Multiply a momentum-space function by ``exp(+-i R g(k^2))``."""
    s = -1.0 if inverse else 1.0
    k = f.grid.nodes
    return f.replace(np.exp(1j * s * params.R * g_function(k**2, params)) * f.values)


def poincare_mass(k, params: SystemParams) -> np.ndarray:
    """``(m1^2 + k^2)^{1/2} + (m2^2 + k^2)^{1/2}``."""
    m1, m2 = params.masses[:2]
    k = np.asarray(k, dtype=float)
    return np.sqrt(m1**2 + k**2) + np.sqrt(m2**2 + k**2)


def first_order_momentum_apply(f: GridFunction, params: SystemParams) -> GridFunction:
    """``(m1 + m2) f + (i/R)(k f' + 3/2 f)``."""
    return f * params.total_mass + m0_momentum_apply(f, params)


def relativistic_tilde_apply(f: GridFunction, params: SystemParams) -> GridFunction:
    """``M^P(k) f + (i/R)(k f' + 3/2 f)``."""
    return f.replace(poincare_mass(f.grid.nodes, params) * f.values) + m0_momentum_apply(f, params)


def relativistic_equivalence_residual(f: GridFunction, params: SystemParams) -> float:
    """``||M~ f - e^{iRg} M_1 e^{-iRg} f|| / ||f||`` (``M_1`` the first-order operator)."""
    inner = equivalence_phase_relativistic(f, params, inverse=True)
    rhs = equivalence_phase_relativistic(first_order_momentum_apply(inner, params), params)
    return (relativistic_tilde_apply(f, params) - rhs).norm() / f.norm()


@dataclass(frozen=True)
class PoincareComparison:
    deviation: float     # ||M~ f - M^P f|| / ||f||
    bound: float         # (||k f'|| / ||f|| + 3/2) / R
    slowness: float      # ||f'|| / (R ||f||), small for slowly varying packets


def poincare_comparison(f: GridFunction, params: SystemParams) -> PoincareComparison:
    """How far ``M~`` is from the Poincare mass ``M^P`` on ``f``."""
    mp = f.replace(poincare_mass(f.grid.nodes, params) * f.values)
    dev = (relativistic_tilde_apply(f, params) - mp).norm() / f.norm()
    df = differentiate(f, 1)
    kdf = df.replace(f.grid.nodes * df.values)
    nf = f.norm()
    return PoincareComparison(dev, (kdf.norm() / nf + 1.5) / params.R, df.norm() / (params.R * nf))


# --- the squared mass at fixed total momentum ---------------------------------

MASS_SQUARED_FORMULA = ("[m1+m2 - (i/R)(r.d/dr + 3/2)]^2 + m1 m2/(R M)^2 [r^2 P^2 - 2 (r.P)^2]"
                        " + i(m2-m1)/(R^2 M) [2 (r.P)(r.d/dr) + 3 r.P - r^2 P.d/dr]")

class _StateCalc:
    def __init__(self, grid):
        self.c = calculus(grid)

    def pos(self, f, i):
        return self.c.position(f, i)

    def grad(self, f, i):
        return self.c.gradient(f, i)

    def euler(self, f):
        return self.c.r_d_dr(f)


class _PolyCalc:
    def __init__(self, offset):
        self.o = offset

    def pos(self, f, i):
        return f.times(self.o + i)

    def grad(self, f, i):
        return f.deriv(self.o + i)

    def euler(self, f):
        return sum((self.pos(self.grad(f, i), i) for i in range(1, 3)), self.pos(self.grad(f, 0), 0))


def _calc_for(f, offset):
    if isinstance(f, State):
        return _StateCalc(f.grid)
    if isinstance(f, PolyGaussian):
        return _PolyCalc(offset)
    raise TypeError(f"cannot apply the squared mass to {type(f).__name__}")


def mass_squared_apply(f, params: SystemParams, P=(0.0, 0.0, 0.0), de_sitter: bool = False,
                       offset: int = 0):
    """``M^2`` of two free spinless particles in the sector of total momentum ``P``.

    ``M^2 = [m1 + m2 - (i/R)(r.d/dr + 3/2)]^2
    + m1 m2/(R^2 (m1+m2)^2) [r^2 P^2 - 2 (r.P)^2]
    + i (m2 - m1)/(R^2 (m1+m2)) [2 (r.P)(r.d/dr) + 3 r.P - r^2 (P.d/dr)]``.

    ``f`` is a :class:`State` on a radial grid or a :class:`PolyGaussian`
    whose variables ``offset .. offset+2`` are ``r``.
    """
    c = _calc_for(f, offset)
    m1, m2 = params.masses[:2]
    M, R = m1 + m2, params.R
    P = np.asarray(P, dtype=float)

    def a(g):
        return g * M - (c.euler(g) + g * 1.5) * (1j / R)

    out = a(a(f))
    if np.any(P != 0):
        def rP(g):
            terms = [c.pos(g, i) * P[i] for i in range(3) if P[i] != 0]
            return sum(terms[1:], terms[0])

        def r2(g):
            return sum((c.pos(c.pos(g, i), i) for i in range(1, 3)), c.pos(c.pos(g, 0), 0))

        def Pd(g):
            terms = [c.grad(g, i) * P[i] for i in range(3) if P[i] != 0]
            return sum(terms[1:], terms[0])

        out = out + (r2(f) * float(P @ P) - rP(rP(f)) * 2) * (m1 * m2 / (R * M) ** 2)
        if m1 != m2:
            cross = rP(c.euler(f)) * 2 + rP(f) * 3 - r2(Pd(f))
            out = out + cross * (1j * (m2 - m1) / (R**2 * M))
    return out * R**2 if de_sitter else out


def expectation(f, g, weights=None) -> complex:
    """``<f, g> / <f, f>`` for states or Gaussian-polynomial functions."""
    if isinstance(f, State):
        return complex(f.inner(g, weights) / f.norm2(weights))
    return complex(f.inner(g) / f.norm2())


# --- matrices on log grids ----------------------------------------------------

def _dilation(grid: RadialGrid, params: SystemParams) -> np.ndarray:
    return discretize_m0(grid, params).matrix


def _first_order_matrix(grid, params, representation):
    sign = 1.0 if representation == "momentum" else -1.0
    return params.total_mass * np.eye(grid.n) + sign * _dilation(grid, params)


def _tilde_matrix(grid, params):
    return np.diag(poincare_mass(grid.nodes, params)) + _dilation(grid, params)


def particle_mass_operator(m: float, label: str = "particle") -> LinearOperatorSpec:
    """A structureless subsystem of mass ``m`` (no internal variables)."""
    mat = np.array([[float(m)]], dtype=complex)
    return LinearOperatorSpec(f"m[{label}]", f"{m}", "momentum", lambda f: mat @ np.asarray(f),
                              matrix=lambda grid=None: mat,
                              meta={"variables": (), "grids": (), "shape": ()})


def _sqrt_plus_ksq(A: np.ndarray, k: np.ndarray) -> np.ndarray:
    """``(A^2 (x) 1 + 1 (x) k^2)^{1/2}`` for Hermitian ``A`` and diagonal ``k``."""
    ev, U = np.linalg.eigh(A)
    diag = np.sqrt(ev[:, None] ** 2 + k[None, :] ** 2).ravel()
    W = np.kron(U, np.eye(k.size))
    return (W * diag[None, :]) @ W.conj().T


def compose_subsystems(M_alpha: LinearOperatorSpec, M_beta: LinearOperatorSpec,
                       params: SystemParams, grid: RadialGrid, variable: str = "k",
                       tilde: bool = False) -> LinearOperatorSpec:
    """Mass operator of two subsystems joined by the relative momentum ``variable``.

    ``M = M_a + M_b + (i/R)(k d/dk + 3/2)``, or with ``tilde=True``
    ``(M_a^2 + k^2)^{1/2} + (M_b^2 + k^2)^{1/2} + (i/R)(k d/dk + 3/2)``.
    The product space is ordered (variables of ``a``, of ``b``, ``variable``).
    """
    va, vb = tuple(M_alpha.meta.get("variables", ())), tuple(M_beta.meta.get("variables", ()))
    clash = (set(va) & set(vb)) | ({variable} & (set(va) | set(vb)))
    if clash:
        raise ValueError(f"subsystems share internal variables {sorted(clash)}")
    A, B = M_alpha.dense(None), M_beta.dense(None)
    na, nb, n = A.shape[0], B.shape[0], grid.n
    Ia, Ib, Ig = np.eye(na), np.eye(nb), np.eye(n)
    dil = np.kron(np.kron(Ia, Ib), _dilation(grid, params))
    if tilde:
        k = grid.nodes
        Sa = _sqrt_plus_ksq(A, k)                 # acts on (a, k)
        Sb = _sqrt_plus_ksq(B, k)                 # acts on (b, k)
        # reorder (a, k) x b and a x (b, k) to (a, b, k)
        Sa_full = np.kron(Sa, Ib).reshape(na, n, nb, na, n, nb).transpose(0, 2, 1, 3, 5, 4)
        Sa_full = Sa_full.reshape(na * nb * n, na * nb * n)
        Sb_full = np.kron(Ia, Sb)
        mat = Sa_full + Sb_full + dil
        formula = "(Ma^2 + k^2)^1/2 + (Mb^2 + k^2)^1/2 + (i/R)(k d/dk + 3/2)"
    else:
        mat = np.kron(np.kron(A, Ib), Ig) + np.kron(np.kron(Ia, B), Ig) + dil
        formula = "Ma + Mb + (i/R)(k d/dk + 3/2)"
    shape = tuple(M_alpha.meta.get("shape", ())) + tuple(M_beta.meta.get("shape", ())) + (n,)
    grids = tuple(M_alpha.meta.get("grids", ())) + tuple(M_beta.meta.get("grids", ())) + (grid,)
    return LinearOperatorSpec(f"({M_alpha.name} + {M_beta.name})[{variable}]", formula, "momentum",
                              lambda f: (mat @ np.asarray(f).reshape(-1)).reshape(np.shape(f)),
                              matrix=lambda g=None: mat,
                              meta={"variables": va + vb + (variable,), "grids": grids,
                                    "shape": shape, "tilde": tilde})


def _three_body_matrix(grids, params, tilde):
    g1, g2 = grids
    n1, n2 = g1.n, g2.n
    dil = np.kron(_dilation(g1, params), np.eye(n2)) + np.kron(np.eye(n1), _dilation(g2, params))
    if not tilde:
        return params.total_mass * np.eye(n1 * n2) + dil
    m1, m2, m3 = params.masses
    k, K = g1.nodes[:, None], g2.nodes[None, :]
    m12p = np.sqrt(m1**2 + k**2) + np.sqrt(m2**2 + k**2)
    diag = np.sqrt(m12p**2 + K**2) + np.sqrt(m3**2 + K**2)
    return np.diag(diag.ravel()) + dil


def build_mass_operator(spec: MassOperatorSpec, grid=None) -> LinearOperatorSpec:
    """Discretized mass operator described by ``spec``.

    ``grid`` is the log grid of the relative momentum (composed form) or a
    pair of grids ``(k12, K12)`` (three-body form); other forms take the
    grid from their argument.
    """
    p, form, rep = spec.params, spec.form, spec.representation
    meta = {"form": form, "representation": rep, **spec.meta}
    if form == "first_order":
        if rep == "momentum":
            return LinearOperatorSpec("M[first_order]", "m1 + m2 + (i/R)(k d/dk + 3/2)", rep,
                                      lambda f: first_order_momentum_apply(f, p),
                                      matrix=lambda g: _first_order_matrix(g, p, rep), meta=meta)
        return LinearOperatorSpec("M[first_order]", "m1 + m2 - (i/R)(r d/dr + 3/2)", rep,
                                  lambda f: first_order_mass_apply(f, p),
                                  matrix=lambda g: _first_order_matrix(g, p, rep), meta=meta)
    if form == "relativistic_tilde":
        return LinearOperatorSpec("M~", "(m1^2+k^2)^1/2 + (m2^2+k^2)^1/2 + (i/R)(k d/dk + 3/2)",
                                  rep, lambda f: relativistic_tilde_apply(f, p),
                                  matrix=lambda g: _tilde_matrix(g, p), meta=meta)
    if form == "nonrel":
        if rep == "momentum":
            return LinearOperatorSpec("M_nr", "k^2/2m12 + (i/R)(k d/dk + 3/2)", rep,
                                      lambda f: nr_momentum_apply(f, p),
                                      matrix=lambda g: discretize_nr_momentum(g, p).matrix, meta=meta)
        V = spec.potential
        return LinearOperatorSpec("M_nr", "-Delta/2m12 - (i/R)(r d/dr + 3/2)", rep,
                                  lambda f: nr_coordinate_apply(f, p, V),
                                  matrix=lambda g: discretize_nr_coordinate(g, p, V=V).matrix,
                                  meta=meta)
    if form == "dS_exact":
        P = tuple(float(x) for x in spec.P)
        at_rest = not any(P)
        scale = p.R**2 if spec.de_sitter else 1.0
        mat = (lambda g: scale * np.linalg.matrix_power(_first_order_matrix(g, p, "coordinate"), 2)) \
            if at_rest else None
        name = "M_dS^2" if spec.de_sitter else "M^2"
        return LinearOperatorSpec(f"{name}[P={P}]", MASS_SQUARED_FORMULA, rep,
                                  lambda f: mass_squared_apply(f, p, P, spec.de_sitter),
                                  matrix=mat, meta={**meta, "P": P})
    if form == "composed":
        if grid is None:
            raise ValueError("the composed form needs the grid of the relative momentum")
        subs = spec.subsystems or tuple(particle_mass_operator(m, f"{i + 1}")
                                        for i, m in enumerate(p.masses[:2]))
        if len(subs) != 2:
            raise ValueError("composition joins exactly two subsystems")
        return compose_subsystems(subs[0], subs[1], p, grid, spec.meta.get("variable", "k"),
                                  tilde=spec.tilde)
    # three_body
    if p.masses.size != 3:
        raise ValueError("the three-body form needs three particles")
    if grid is None or len(grid) != 2:
        raise ValueError("the three-body form needs a pair of grids (k12, K12)")
    mat = _three_body_matrix(tuple(grid), p, spec.tilde)
    formula = ("(M12P^2+K^2)^1/2 + (m3^2+K^2)^1/2 + (i/R)(k12.d + 3/2) + (i/R)(K12.d + 3/2)"
               if spec.tilde else "m1 + m2 + m3 + (i/R)(k12.d + 3/2) + (i/R)(K12.d + 3/2)")
    return LinearOperatorSpec("M123" + ("~" if spec.tilde else ""), formula, rep,
                              lambda f: (mat @ np.asarray(f).reshape(-1)).reshape(np.shape(f)),
                              matrix=lambda g=None: mat,
                              meta={**meta, "variables": ("k12", "K12"), "grids": tuple(grid),
                                    "shape": (grid[0].n, grid[1].n)})


def band_symmetry(eigenvalues, center: float) -> float:
    """``max |sorted(ev - c) + reversed(sorted(ev - c))|``: zero for a band symmetric about ``c``."""
    e = np.sort(np.real(np.asarray(eigenvalues)) - center)
    return float(np.max(np.abs(e + e[::-1])))
