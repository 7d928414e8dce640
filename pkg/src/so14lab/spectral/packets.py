"""Eigenpackets: smeared overlaps, eigenbasis expansion and the intertwiner U.

Continuum eigenfunctions are never compared pointwise.  A packet
``Phi(r) = int w(lam) phi_lam(r) dlam`` is a square-integrable function, and
delta normalization predicts ``<Phi_a, Phi_b> = int conj(a) b dlam``.  The
lambda integral is done with trapezoid weights on a uniform lambda grid; its
step must resolve the oscillation of ``phi_lam(r)`` in lambda over the
r-range of the grid, which is checked and reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics.grids import GridFunction, RadialGrid, make_loglinear_grid
from ..params import SystemParams
from .eigenfunctions import (eigenfunction_closed_form, free_eigenfunction_coordinate,
                             free_eigenfunction_momentum, nr_coordinate_apply)
from .potentials import PotentialSpec
from .radial import solve_radial_batch

FREE_FAMILIES = ("free_coordinate", "free_momentum", "free_nr")
LEAKAGE_WARN = 1e-3
EDGE_WARN = 1e-4
BOUNDARY_LAYER = 8        # outer nodes reached only by one-sided stencils


@dataclass(frozen=True)
class EigenPacketWeights:
    """Weights ``w(lam)`` sampled on a uniform lambda grid for partial wave ``(l, m)``."""

    lam: np.ndarray
    w: np.ndarray
    l: int = 0
    m: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        w = np.asarray(self.w, dtype=complex)
        if lam.ndim != 1 or lam.shape != w.shape or lam.size < 2:
            raise ValueError("lam and w must be 1-D arrays of equal length >= 2")
        if not np.allclose(np.diff(lam), lam[1] - lam[0], rtol=1e-9, atol=0):
            raise ValueError("lambda grid must be uniform")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "w", w)

    @property
    def step(self) -> float:
        return float(self.lam[1] - self.lam[0])

    @property
    def quad(self) -> np.ndarray:
        """Trapezoid weights on the lambda grid."""
        q = np.full(self.lam.size, self.step)
        q[0] = q[-1] = self.step / 2
        return q

    def norm2(self) -> float:
        return float(np.sum(self.quad * np.abs(self.w) ** 2))

    def inner(self, other: "EigenPacketWeights") -> complex:
        if not np.array_equal(self.lam, other.lam):
            raise ValueError("weights live on different lambda grids")
        return complex(np.sum(self.quad * np.conj(self.w) * other.w))

    @classmethod
    def gaussian(cls, lam0: float, sigma: float, lam_grid, l: int = 0, m: int = 0,
                 shift: float = 0.0) -> "EigenPacketWeights":
        """``exp(-(lam - lam0)^2 / 4 sigma^2) exp(i lam shift)`` on ``lam_grid``.

        ``|w|^2`` is a Gaussian of standard deviation ``sigma``; ``shift``
        translates the packet by ``shift / R`` in ``ln r`` (free coordinate
        family) or in ``-ln k`` (momentum family).
        """
        lam = np.asarray(lam_grid, dtype=float)
        w = np.exp(-((lam - lam0) ** 2) / (4 * sigma**2) + 1j * lam * shift)
        return cls(lam, w, l, m, {"lam0": lam0, "sigma": sigma, "shift": shift})


def lambda_grid(lam0: float, sigma: float, step: float, width: float = 7.0) -> np.ndarray:
    """Uniform lambda grid covering ``lam0 +- width * sigma``."""
    n = int(np.ceil(width * sigma / step))
    return lam0 + step * np.arange(-n, n + 1)


def chirp_resolving_grid(params: SystemParams, r_max: float, r_min: float = 1e-3,
                         points_per_wavelength: float = 8.0, r_switch: float = 5.0) -> RadialGrid:
    """Log-linear grid whose linear part resolves ``exp(-i m12 r^2 / R)`` up to ``r_max``.

    The local wavelength of the chirp is ``pi R / (m12 r)``, so uniform
    log grids undersample it at large r and finite-difference operators
    lose accuracy there long before the packet density is negligible.
    """
    wavelength = np.pi * params.R / (params.m12 * r_max)
    dr = wavelength / points_per_wavelength
    span = (r_max - r_min) + r_switch * np.log(r_max / r_min)
    n = max(int(np.ceil(span / dr)) + 1, 64)
    return make_loglinear_grid(r_min, r_max, n, r_switch)


def family_matrix(family, lams, l: int, params: SystemParams, grid: RadialGrid) -> np.ndarray:
    """Rows are ``phi_lam`` sampled on ``grid`` for each ``lam``.

    ``family`` is one of ``free_coordinate`` (first-order mass operator,
    ``lam`` is the full mass), ``free_momentum`` (momentum eigenfunctions of
    ``M_nr``; ``grid`` is a k-grid), ``free_nr`` (coordinate eigenfunctions of
    ``M_nr`` from the closed form) or a :class:`PotentialSpec` for the
    interacting family.
    """
    lams = np.asarray(lams, dtype=float)
    x = grid.nodes
    if isinstance(family, PotentialSpec):
        sols = solve_radial_batch(family, lams, l, params, grid)
        return np.array([s.values for s in sols])
    if family == "free_coordinate":
        return np.array([free_eigenfunction_coordinate(lam, params, x) for lam in lams])
    if family == "free_momentum":
        return np.array([free_eigenfunction_momentum(lam, l, params, x) for lam in lams])
    if family == "free_nr":
        return np.array([eigenfunction_closed_form(lam, l, params, x) for lam in lams])
    raise ValueError(f"unknown eigenfunction family {family!r}")


def _lambda_resolution_warning(step, params, grid):
    # phi_lam(r) oscillates in lam like exp(i lam R ln r); the lambda sum aliases
    # unless R * step * (ln-range of the grid) stays below pi
    span = float(np.log(grid.nodes[-1] / grid.nodes[0]))
    alias = params.R * step * span
    if alias > np.pi:
        return [f"lambda step {step:.3g} too coarse for the grid's ln-range "
                f"(R*dlam*span = {alias:.2f} > pi)"]
    return []


def synthesize(weights: EigenPacketWeights, phis: np.ndarray, grid: RadialGrid) -> GridFunction:
    """``sum_j q_j w_j phi_j`` as a grid function."""
    vals = (weights.quad * weights.w) @ phis
    return GridFunction(grid, vals, l=weights.l, m=weights.m)


def _edge_warning(f: GridFunction):
    dens = np.abs(f.values) ** 2 * f.grid.nodes**3
    peak = dens.max(initial=0.0)
    if peak > 0 and max(dens[0], dens[-1]) > EDGE_WARN * peak:
        return [f"packet not contained in the grid (edge density {max(dens[0], dens[-1]) / peak:.1e})"]
    return []


@dataclass(frozen=True)
class OverlapResult:
    value: complex
    predicted: complex
    warnings: list

    @property
    def relative_error(self) -> float:
        return abs(self.value - self.predicted) / max(abs(self.predicted), 1e-300)


def smeared_overlap(a: EigenPacketWeights, b: EigenPacketWeights, family, params: SystemParams,
                    grid: RadialGrid, phis: np.ndarray | None = None) -> OverlapResult:
    """``<int a phi_lam dlam, int b phi_lam' dlam'>`` by grid quadrature.

    ``predicted`` is the delta-normalization value ``int conj(a) b dlam``.
    Precomputed family samples ``phis`` (rows on ``a.lam``) may be passed in.
    """
    if a.l != b.l:
        raise ValueError("packets in different partial waves")
    if phis is None:
        phis = family_matrix(family, a.lam, a.l, params, grid)
    fa = synthesize(a, phis, grid)
    fb = synthesize(b, phis, grid)
    warnings = _lambda_resolution_warning(a.step, params, grid) + _edge_warning(fa) + _edge_warning(fb)
    return OverlapResult(fa.inner(fb), a.inner(b), warnings)


def expand_in_eigenbasis(phi: GridFunction, family, lam_grid, params: SystemParams,
                         phis: np.ndarray | None = None) -> EigenPacketWeights:
    """Coefficients ``c(lam) = <phi_lam, phi>``; Parseval leakage in ``meta``."""
    lam_grid = np.asarray(lam_grid, dtype=float)
    if phis is None:
        phis = family_matrix(family, lam_grid, phi.l, params, phi.grid)
    c = np.conj(phis) @ (phi.grid.weights * phi.values)
    out = EigenPacketWeights(lam_grid, c, phi.l, phi.m)
    n2 = phi.norm2()
    leak = (n2 - out.norm2()) / n2 if n2 > 0 else 0.0
    warnings = _lambda_resolution_warning(out.step, params, phi.grid)
    if abs(leak) > LEAKAGE_WARN:
        warnings.append(f"spectral leakage outside the lambda grid: {leak:.2e} of the norm")
    out.meta.update({"leakage": float(leak), "warnings": warnings})
    return out


class IntertwinerU:
    """``U = (synthesis in the interacting basis) o (analysis in the free basis)``.

    Acts per partial wave ``l <= l_max``; eigenfunction samples are computed
    once per ``l`` and cached.  Both bases come from the same radial
    integrator (the free one with ``V = none``), so discretization errors
    common to both cancel and ``U`` is the identity at zero coupling.
    """

    def __init__(self, V: PotentialSpec, lam_grid, l_max: int, params: SystemParams,
                 grid: RadialGrid):
        self.V = V
        self.lam = np.asarray(lam_grid, dtype=float)
        self.l_max = l_max
        self.params = params
        self.grid = grid
        self._free: dict[int, np.ndarray] = {}
        self._int: dict[int, np.ndarray] = {}

    def _bases(self, l):
        if l > self.l_max:
            raise ValueError(f"partial wave l={l} exceeds l_max={self.l_max}")
        if l not in self._free:
            self._free[l] = family_matrix(PotentialSpec.none(), self.lam, l, self.params, self.grid)
            self._int[l] = family_matrix(self.V, self.lam, l, self.params, self.grid)
        return self._free[l], self._int[l]

    def coefficients(self, f: GridFunction) -> EigenPacketWeights:
        free, _ = self._bases(f.l)
        return expand_in_eigenbasis(f, PotentialSpec.none(), self.lam, self.params, phis=free)

    def apply(self, f: GridFunction) -> GridFunction:
        _, inter = self._bases(f.l)
        c = self.coefficients(f)
        out = synthesize(c, inter, self.grid)
        return f.replace(out.values, meta={"leakage": c.meta["leakage"],
                                           "warnings": list(c.meta["warnings"])})

    def apply_inverse(self, g: GridFunction) -> GridFunction:
        free, inter = self._bases(g.l)
        c = expand_in_eigenbasis(g, self.V, self.lam, self.params, phis=inter)
        return g.replace(synthesize(c, free, self.grid).values)

    def conjugation_residual(self, f: GridFunction) -> float:
        """``||M_hat U f - U M_nr f|| / ||f||`` with ``U M_nr f`` from the spectral side.

        ``M_hat`` is applied by finite differences, so the norm skips the
        outermost ``BOUNDARY_LAYER`` nodes where only one-sided stencils
        reach; the grid must resolve the large-r chirp (see
        :func:`chirp_resolving_grid`).
        """
        _, inter = self._bases(f.l)
        c = self.coefficients(f)
        uf = synthesize(c, inter, self.grid)
        lhs = nr_coordinate_apply(uf, self.params, self.V).values
        rhs = synthesize(EigenPacketWeights(c.lam, c.lam * c.w, c.l, c.m), inter, self.grid).values
        w = self.grid.weights[:-BOUNDARY_LAYER]
        num = np.sum(w * np.abs(lhs - rhs)[:-BOUNDARY_LAYER] ** 2)
        return float(np.sqrt(num) / f.norm())

    def norm_ratio(self, f: GridFunction) -> float:
        return self.apply(f).norm() / f.norm()


def build_intertwiner_U(V: PotentialSpec, lambda_grid, l_max: int, params: SystemParams,
                        grid: RadialGrid) -> IntertwinerU:
    """The map sending ``sum c(lam) phi_lam`` to ``sum c(lam) psi_lam`` (see :class:`IntertwinerU`)."""
    return IntertwinerU(V, lambda_grid, l_max, params, grid)
