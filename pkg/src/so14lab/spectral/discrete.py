"""Hermitian matrix discretizations of the radial mass operators.

On a log grid the substitution ``chi = x^{3/2} f`` turns the measure
``x^2 dx`` into ``d rho`` (``rho = ln x``), so every operator becomes a
matrix acting on ``chi`` with the plain Euclidean inner product times the
step ``h``.  First derivatives use the antisymmetric truncated-stencil
matrix ``D``; the first-order mass term ``(i/R)(x d/dx + 3/2)`` is exactly
``(i/R) D`` in this variable and the radial kinetic term is
``(D^T E D + E((l + 1/2)^2 - 1)) / 2 m12`` with ``E = diag(exp(-2 rho))``.
All matrices are Hermitian by construction.

On a linear grid ``r_j = j h`` the usual ``u = r psi`` variable is used with
the three-point Laplacian, which honours ``u(0) = 0`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as la

from ..numerics.grids import GridFunction, RadialGrid, differentiate, index_fd_matrix
from ..operators import LinearOperatorSpec
from ..params import SystemParams
from .potentials import PotentialSpec

HERMITICITY_TOL = 1e-10
LOCALIZATION_THRESHOLD = 0.05
EDGE_FRACTION = 0.1


class DiscretizationError(ArithmeticError):
    """A discretized operator lost a structural property it must have."""


@dataclass(frozen=True)
class DiscreteOperator:
    """Dense Hermitian matrix acting on the unitary variable of ``grid``.

    ``variable`` is ``"chi"`` (log grid, ``chi = x^{3/2} f``) or ``"u"``
    (linear grid, ``u = r f``).
    """

    name: str
    grid: RadialGrid
    matrix: np.ndarray
    l: int = 0
    representation: str = "coordinate"
    variable: str = "chi"
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h(self) -> float:
        return self.grid.step

    def _scale(self):
        x = self.grid.nodes
        return x**1.5 if self.variable == "chi" else x

    def to_unitary(self, f: GridFunction) -> np.ndarray:
        """Samples of ``f`` in the unitary variable, scaled so the Euclidean norm is ``||f||``."""
        return self._scale() * np.asarray(f.values) * np.sqrt(self.h)

    def from_unitary(self, v: np.ndarray, like: GridFunction | None = None) -> GridFunction:
        vals = np.asarray(v) / (self._scale() * np.sqrt(self.h))
        if like is not None:
            return like.replace(vals)
        return GridFunction(self.grid, vals, l=self.l)

    def apply(self, f: GridFunction) -> GridFunction:
        return self.from_unitary(self.matrix @ self.to_unitary(f), like=f)

    def hermiticity_defect(self) -> float:
        a = self.matrix
        return float(np.linalg.norm(a - a.conj().T) / max(np.linalg.norm(a), 1e-300))

    def check_hermitian(self, tol: float = HERMITICITY_TOL):
        d = self.hermiticity_defect()
        if d > tol:
            raise DiscretizationError(f"{self.name} is not Hermitian (defect {d:.2e} > {tol:.0e})")

    @cached_property
    def eig(self):
        """``(eigenvalues, eigenvectors)`` of the Hermitian part, ascending."""
        self.check_hermitian()
        a = self.matrix
        return la.eigh((a + a.conj().T) / 2)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig[0]

    def as_spec(self) -> LinearOperatorSpec:
        return LinearOperatorSpec(self.name, self.meta.get("formula", self.name),
                                  self.representation, self.apply,
                                  matrix=lambda grid: self.matrix, meta=dict(self.meta))


def _require(grid: RadialGrid, kind: str):
    if grid.spacing_kind != kind:
        raise ValueError(f"this discretization needs a {kind} grid, got {grid.spacing_kind!r}")


def rho_derivative_matrix(grid: RadialGrid) -> np.ndarray:
    """Antisymmetric d/d rho on a log grid (eighth order in the interior)."""
    _require(grid, "log-uniform")
    return index_fd_matrix(grid.n, 1, boundary="zero").toarray() / grid.step


def discretize_m0(grid: RadialGrid, params: SystemParams) -> DiscreteOperator:
    """``M_0 = (i/R)(k d/dk + 3/2)`` on a log k-grid."""
    mat = 1j / params.R * rho_derivative_matrix(grid)
    return DiscreteOperator("M0", grid, mat, representation="momentum",
                            meta={"formula": "(i/R)(k d/dk + 3/2)"})


def nr_phase(k, params: SystemParams) -> np.ndarray:
    """``R k^2 / 4 m12``."""
    return params.R * np.asarray(k, dtype=float) ** 2 / (4 * params.m12)


def discretize_nr_momentum(grid: RadialGrid, params: SystemParams,
                           form: str = "conjugated") -> DiscreteOperator:
    """``M_nr = k^2 / 2 m12 + (i/R)(k d/dk + 3/2)`` on a log k-grid.

    ``form="conjugated"`` builds ``P M_0 P^dagger`` with the diagonal unitary
    ``P = exp(i R k^2 / 4 m12)``, which is the exact grid image of the
    continuum equivalence.  ``form="direct"`` discretizes the two terms
    separately; the two agree up to finite-difference error.
    """
    k = grid.nodes
    m0 = discretize_m0(grid, params).matrix
    if form == "conjugated":
        p = np.exp(1j * nr_phase(k, params))
        mat = p[:, None] * m0 * np.conj(p)[None, :]
    elif form == "direct":
        mat = np.diag(k**2 / (2 * params.m12)) + m0
    else:
        raise ValueError(f"unknown form {form!r}; expected 'conjugated' or 'direct'")
    return DiscreteOperator(f"M_nr[{form}]", grid, mat, representation="momentum",
                            meta={"formula": "k^2/2m12 + (i/R)(k d/dk + 3/2)", "form": form})


def _log_coordinate_matrix(grid, params, l, V, cosmological):
    D = rho_derivative_matrix(grid)
    r = grid.nodes
    e = r**-2.0
    kin = (D.T @ (e[:, None] * D) + np.diag(e * ((l + 0.5) ** 2 - 1))) / (2 * params.m12)
    mat = kin.astype(complex)
    if V is not None:
        mat += np.diag(V(r))
    if cosmological:
        mat += -1j / params.R * D
    return mat


def _linear_coordinate_matrix(grid, params, l, V, cosmological):
    r = grid.nodes
    h = grid.step
    if not np.allclose(r, h * np.arange(1, grid.n + 1), rtol=1e-9, atol=0):
        raise ValueError("linear grid must be r_j = j h, j = 1..n (u(0) = 0 is imposed)")
    n = grid.n
    lap = (np.diag(np.full(n - 1, 1.0), 1) + np.diag(np.full(n - 1, 1.0), -1)
           - 2 * np.eye(n)) / h**2
    mat = (-lap + np.diag(l * (l + 1) / r**2)) / (2 * params.m12) + 0j
    if V is not None:
        mat += np.diag(V(r))
    if cosmological:
        # -(i/R)(r d/dr + 3/2) psi  ==  -(i/R)(r d/dr + 1/2) u, symmetrized
        d = (np.diag(np.full(n - 1, 1.0), 1) - np.diag(np.full(n - 1, 1.0), -1)) / (2 * h)
        mat += -0.5j / params.R * (r[:, None] * d + d * r[None, :])
    return mat


def discretize_nr_coordinate(grid: RadialGrid, params: SystemParams, l: int = 0,
                             V: PotentialSpec | None = None,
                             cosmological: bool = True) -> DiscreteOperator:
    """Coordinate-space ``-Delta_l / 2 m12 + V - (i/R)(r d/dr + 3/2)`` in partial wave ``l``.

    With ``cosmological=False`` this is the Galilean operator.  Log grids use
    the ``chi`` variable, linear grids ``r_j = j h`` the ``u = r psi`` variable.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    if grid.spacing_kind == "log-uniform":
        mat, var = _log_coordinate_matrix(grid, params, l, V, cosmological), "chi"
    elif grid.spacing_kind == "linear":
        mat, var = _linear_coordinate_matrix(grid, params, l, V, cosmological), "u"
    else:
        raise ValueError(f"unsupported grid kind {grid.spacing_kind!r}")
    vname = V.describe() if V is not None else "none"
    name = ("M_nr_hat" if cosmological else "M_nr_G") + f"[{vname}]"
    return DiscreteOperator(name, grid, mat, l=l, representation="coordinate", variable=var,
                            meta={"potential": vname, "cosmological": cosmological})


# --- the nonrelativistic equivalence --------------------------------------

def m0_momentum_apply(f: GridFunction, params: SystemParams) -> GridFunction:
    """``(i/R)(k f' + 3/2 f)`` by finite differences."""
    k = f.grid.nodes
    return f.replace(1j / params.R * (k * differentiate(f, 1).values + 1.5 * f.values))


def nr_equivalence_phase(f: GridFunction, params: SystemParams,
                         inverse: bool = False) -> GridFunction:
    """Multiply a momentum-space function by ``exp(+-i R k^2 / 4 m12)``."""
    s = -1.0 if inverse else 1.0
    return f.replace(np.exp(1j * s * nr_phase(f.grid.nodes, params)) * f.values)


def nr_equivalence_residual(f: GridFunction, params: SystemParams) -> float:
    """``||M_nr f - e^{i phi} M_0 e^{-i phi} f|| / ||f||`` with both sides by finite differences."""
    from .eigenfunctions import nr_momentum_apply

    lhs = nr_momentum_apply(f, params)
    rhs = nr_equivalence_phase(m0_momentum_apply(nr_equivalence_phase(f, params, inverse=True),
                                                 params), params)
    return (lhs - rhs).norm() / f.norm()


# --- spectra ----------------------------------------------------------------

def participation_ratio(vectors: np.ndarray) -> np.ndarray:
    """``(sum |v|^2)^2 / sum |v|^4`` for each column: the number of sites a vector occupies."""
    p = np.abs(vectors) ** 2
    return p.sum(axis=0) ** 2 / np.sum(p**2, axis=0)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    participation: np.ndarray
    localized: np.ndarray
    warnings: list
    meta: dict = field(default_factory=dict)

    @property
    def n_localized(self) -> int:
        return int(np.count_nonzero(self.localized))

    @property
    def bound_energies(self) -> np.ndarray:
        return self.eigenvalues[self.localized]


def _bohr_warnings(V, grid, params):
    if V is None or V.kind not in ("coulomb", "yukawa") or V.alpha <= 0:
        return []
    a = 1.0 / (params.m12 * V.alpha)
    r = grid.nodes
    out = []
    spacing = np.interp(a, r[1:], np.diff(r))
    if spacing > a / 4:
        out.append(f"grid spacing {spacing:.3g} near the Bohr radius {a:.3g} is too coarse")
    if r[-1] < 10 * a:
        out.append(f"grid ends at {r[-1]:.3g}, inside 10 Bohr radii ({10 * a:.3g})")
    return out


def edge_weight(vectors: np.ndarray, fraction: float = EDGE_FRACTION) -> np.ndarray:
    """Share of each column's weight carried by the outermost ``fraction`` of the nodes."""
    p = np.abs(vectors) ** 2
    cut = int(np.floor((1 - fraction) * p.shape[0]))
    return p[cut:].sum(axis=0) / p.sum(axis=0)


def galilean_spectrum(V: PotentialSpec | None, grid: RadialGrid, params: SystemParams,
                      l: int = 0, cosmological: bool = False,
                      threshold: float = LOCALIZATION_THRESHOLD) -> SpectrumResult:
    """Dense spectrum of ``-Delta_l/2 m12 + V`` with localization classification.

    An eigenvector counts as localized (bound) when its participation ratio
    is below ``threshold`` times the number of grid nodes and most of its
    weight sits away from the outer grid wall.  The wall condition matters
    with ``cosmological=True``, which restores ``-(i/R)(r d/dr + 3/2)`` on the
    same grid: the truncated dilation term then supports wall-trapped
    vectors at ``|lambda| ~ r_max / (R h)`` that are grid artefacts, present
    for ``V = none`` as well.
    """
    op = discretize_nr_coordinate(grid, params, l, V, cosmological)
    w, v = op.eig
    pr = participation_ratio(v)
    edge = edge_weight(v)
    localized = (pr < threshold * grid.n) & (edge < 0.5)
    meta = {"operator": op.name, "threshold": threshold, "n": grid.n,
            "edge_states": int(np.count_nonzero((pr < threshold * grid.n) & (edge >= 0.5)))}
    return SpectrumResult(w, pr, localized, _bohr_warnings(V, grid, params), meta)


@dataclass(frozen=True)
class SpectrumComparison:
    max_abs: float
    window_max_abs: float
    counting_distance: float
    window: tuple


def compare_spectra(ev_a, ev_b, window: tuple | None = None) -> SpectrumComparison:
    """Difference statistics between two sorted spectra of equal length.

    ``max_abs`` is the largest difference of sorted eigenvalues,
    ``window_max_abs`` the same restricted to eigenvalues of ``a`` inside
    ``window``, and ``counting_distance`` the largest difference of the two
    normalized eigenvalue counting functions over ``window``.
    """
    a = np.sort(np.asarray(ev_a, dtype=float))
    b = np.sort(np.asarray(ev_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("spectra have different sizes")
    d = np.abs(a - b)
    if window is None:
        window = (float(min(a[0], b[0])), float(max(a[-1], b[-1])))
    lo, hi = window
    mask = (a >= lo) & (a <= hi)
    # interior probes only: the default window ends on eigenvalues, where
    # rounding-level differences would flip a count
    probe = np.linspace(lo, hi, 2003)[1:-1]
    ca = np.searchsorted(a, probe) / a.size
    cb = np.searchsorted(b, probe) / b.size
    return SpectrumComparison(float(d.max()), float(d[mask].max(initial=0.0)),
                              float(np.max(np.abs(ca - cb))), (lo, hi))


# --- wave operators ---------------------------------------------------------

def _as_discrete(op) -> np.ndarray:
    if isinstance(op, DiscreteOperator):
        op.check_hermitian()
        return op
    raise TypeError("wave operators need DiscreteOperator inputs")


def _evolve(op: DiscreteOperator, v, t):
    w, U = op.eig
    return U @ (np.exp(-1j * w * t) * (U.conj().T @ v))


def wave_operator_apply(A: DiscreteOperator, A_hat: DiscreteOperator, t: float,
                        packet: GridFunction) -> GridFunction:
    """``exp(i A_hat t) exp(-i A t) packet`` by spectral exponentiation.

    ``meta`` carries the norm ratio and the intertwining residual
    ``||A_hat W f - W A f|| / ||f||`` at this ``t``.
    """
    A, A_hat = _as_discrete(A), _as_discrete(A_hat)
    if A.grid is not A_hat.grid and not np.array_equal(A.grid.nodes, A_hat.grid.nodes):
        raise ValueError("operators live on different grids")
    v = A.to_unitary(packet)
    wv = _evolve(A_hat, _evolve(A, v, t), -t)
    wav = _evolve(A_hat, _evolve(A, A.matrix @ v, t), -t)
    nv = np.linalg.norm(v)
    meta = {"t": float(t), "norm_ratio": float(np.linalg.norm(wv) / nv),
            "intertwining_residual": float(np.linalg.norm(A_hat.matrix @ wv - wav) / nv)}
    return GridFunction(packet.grid, A.from_unitary(wv).values, l=packet.l, m=packet.m, meta=meta)


@dataclass(frozen=True)
class WaveOperatorSweep:
    times: np.ndarray
    norm_ratio: np.ndarray
    cauchy: np.ndarray            # ||W(t_{j+1}) f - W(t_j) f|| / ||f||
    intertwining_residual: np.ndarray

    def decreasing(self, jitter: float = 0.1) -> bool:
        """Cauchy differences never grow by more than ``jitter`` from one step to the next."""
        c = self.cauchy
        return bool(np.all(c[1:] <= (1 + jitter) * c[:-1]))


def wave_operator_sweep(A: DiscreteOperator, A_hat: DiscreteOperator, times,
                        packet: GridFunction) -> WaveOperatorSweep:
    """Apply ``W(t)`` over increasing ``times`` and collect the Cauchy diagnostic."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing with at least two entries")
    outs = [wave_operator_apply(A, A_hat, t, packet) for t in times]
    vs = [A.to_unitary(o) for o in outs]
    nf = np.linalg.norm(A.to_unitary(packet))
    cauchy = np.array([np.linalg.norm(vs[j + 1] - vs[j]) / nf for j in range(len(vs) - 1)])
    return WaveOperatorSweep(times, np.array([o.meta["norm_ratio"] for o in outs]), cauchy,
                             np.array([o.meta["intertwining_residual"] for o in outs]))
