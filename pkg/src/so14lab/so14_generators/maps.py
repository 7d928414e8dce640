"""Maps between realizations, the Poincare contraction and the de Sitter energy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ..numerics.grids import RadialGrid, map_grid
from ..params import ParticleParams
from .angular import State
from .generators import Realization, calculus, tensor_generator

# exp(-i PHASE_COEF mu ln v0); see ledger for the coefficient
PHASE_COEF = 1.0


def velocity_to_sphere_grid(grid: RadialGrid) -> RadialGrid:
    """Radial grid in ``|u| = |v| / v0`` carried by the nodes of a ``|v|`` grid."""
    return map_grid(grid, lambda r: r / np.sqrt(1 + r**2), lambda r: (1 + r**2) ** -1.5)


@dataclass(frozen=True)
class VelocitySphereMap:
    """``phi(u) = exp(-i c mu ln v0) v0^{3/2} f(v)`` with ``u = -v/v0`` (``c = PHASE_COEF``).

    Built for one velocity grid; the image lives on the mapped grid
    ``u_grid`` and the inverse map goes back.
    """

    params: ParticleParams
    v_grid: RadialGrid
    u_grid: RadialGrid
    phase_coef: float = PHASE_COEF

    @classmethod
    def for_grid(cls, params: ParticleParams, v_grid: RadialGrid,
                 phase_coef: float = PHASE_COEF) -> "VelocitySphereMap":
        return cls(params, v_grid, velocity_to_sphere_grid(v_grid), phase_coef)

    def _factor(self):
        v0 = np.sqrt(1 + self.v_grid.nodes**2)
        return np.exp(-1j * self.phase_coef * self.params.signed_mu * np.log(v0)) * v0**1.5

    def forward(self, f: State) -> State:
        if f.grid is not self.v_grid:
            raise ValueError("state is not on the map's velocity grid")
        fac = self._factor()
        # u = -v/v0 flips the direction: Y_lm(-n) = (-1)^l Y_lm(n)
        return State(self.u_grid, {(l, m): (-1) ** l * fac[(slice(None),) + (None,) * (v.ndim - 1)] * v
                                   for (l, m), v in f.parts.items()})

    def inverse(self, phi: State) -> State:
        if phi.grid is not self.u_grid:
            raise ValueError("state is not on the map's sphere grid")
        fac = 1.0 / self._factor()
        return State(self.v_grid, {(l, m): (-1) ** l * fac[(slice(None),) + (None,) * (v.ndim - 1)] * v
                                   for (l, m), v in phi.parts.items()})


def intertwine_v_to_u(f: State, params: ParticleParams,
                      phase_coef: float = PHASE_COEF) -> State:
    """Velocity-hyperboloid state to the 3-sphere (lower hemisphere) realization."""
    return VelocitySphereMap.for_grid(params, f.grid, phase_coef).forward(f)


@dataclass(frozen=True)
class IntertwinerCheck:
    norm_ratio: float
    residuals: dict


def intertwiner_check(f: State, params: ParticleParams, labels=("M1", "M2", "M3", "L04"),
                      phase_coef: float = PHASE_COEF) -> IntertwinerCheck:
    """Norm ratio and ``||U X_v f - X_u U f|| / ||U f||`` per generator label.

    Generators are compared as tensor components (``L04`` is ``L^{04}``).
    """
    vel = Realization("velocity_hyperboloid", params)
    sph = Realization("sphere", params, hemisphere=-1)
    U = VelocitySphereMap.for_grid(params, f.grid, phase_coef)
    uf = U.forward(f)
    wv, wu = vel.measure_weights(U.v_grid), sph.measure_weights(U.u_grid)
    ratio = float(uf.norm(wu) / f.norm(wv))
    res = {}
    for lab in labels:
        lhs = U.forward(tensor_generator(vel, lab)(f))
        rhs = tensor_generator(sph, lab)(uf)
        res[lab] = float((lhs - rhs).norm(wu) / uf.norm(wu))
    return IntertwinerCheck(ratio, res)


# --- Poincare contraction -----------------------------------------------------

def scaled_grid(grid: RadialGrid, scale: float) -> RadialGrid:
    """Grid with nodes ``scale * x`` (used for ``u = x / R1``)."""
    return map_grid(grid, lambda r: scale * r, lambda r: np.full_like(r, scale))


def _slope(Rs, values):
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        return float("nan")
    return float(np.polyfit(np.log(Rs), np.log(values), 1)[0])


@dataclass(frozen=True)
class ContractionReport:
    R: np.ndarray
    residuals: dict            # name -> residual per R
    slopes: dict               # name -> d ln(residual) / d ln R

    def rate_ok(self, names=None, expected: float = -1.0, factor: float = 2.0) -> bool:
        """Fitted slopes lie within a factor ``factor`` of ``expected``."""
        names = self.residuals if names is None else names
        lo, hi = sorted((expected * factor, expected / factor))
        return all(lo <= self.slopes[n] <= hi for n in names)


def contraction_check(m: float, R_sequence, test: State) -> ContractionReport:
    """Residuals of the large-R limits as functions of ``R`` at fixed mass ``m``.

    ``test`` is a spinless state on a radial grid used both as ``f(v)`` for
    the velocity realization (``B/R -> m v``, ``L_{04}/R -> m v0``) and as
    ``f(x)`` for the sphere realization near its south pole with
    ``u = x / R`` (``B/R -> p``, ``N/R -> -p``, ``L_{04}/R -> m`` with
    ``L_{04} = -L^{04}``).
    """
    Rs = np.asarray(R_sequence, dtype=float)
    grid = test.grid
    r = grid.nodes
    calc = calculus(grid)
    w = grid.weights
    nf = test.norm(w)
    names = ("velocity_B", "velocity_L04", "pole_B", "pole_N", "pole_L04")
    res = {k: [] for k in names}
    for R in Rs:
        pp = ParticleParams(mu=m * R, R=R)
        vel = Realization("velocity_hyperboloid", pp)
        B = [tensor_generator(vel, f"B{i}")(test) * (1 / R) for i in (1, 2, 3)]
        mv = [calc.position(test, i) * m for i in range(3)]
        res["velocity_B"].append(np.sqrt(sum((b - x).norm2(w) for b, x in zip(B, mv))) / nf)
        L = tensor_generator(vel, "L04")(test) * (-1 / R)
        res["velocity_L04"].append((L - test.radial(m * np.sqrt(1 + r**2))).norm(w) / nf)

        ugrid = scaled_grid(grid, 1.0 / R)
        fu = State(ugrid, test.parts)
        sph = Realization("sphere", pp, hemisphere=-1)
        p = [calc.gradient(test, i) * -1j for i in range(3)]
        Bu = [tensor_generator(sph, f"B{i}")(fu) for i in (1, 2, 3)]
        Nu = [tensor_generator(sph, f"N{i}")(fu) for i in (1, 2, 3)]
        d_b = np.sqrt(sum((State(grid, (b * (1 / R)).parts) - pi).norm2(w)
                          for b, pi in zip(Bu, p))) / nf
        d_n = np.sqrt(sum((State(grid, (n_ * (1 / R)).parts) + pi).norm2(w)
                          for n_, pi in zip(Nu, p))) / nf
        L04 = State(grid, (tensor_generator(sph, "L04")(fu) * (-1 / R)).parts)
        d_l = (L04 - test * m).norm(w) / nf
        res["pole_B"].append(d_b)
        res["pole_N"].append(d_n)
        res["pole_L04"].append(d_l)
    res = {k: np.array(v, dtype=float) for k, v in res.items()}
    return ContractionReport(Rs, res, {k: _slope(Rs, v) for k, v in res.items()})


# --- de Sitter energy ---------------------------------------------------------

class PositivityError(ArithmeticError):
    """A discretized operator that must be nonnegative is not."""


def _blocks(op, grid: RadialGrid, l: int, m: int) -> dict:
    """Matrix blocks ``(l, m) -> (l', m')`` of ``op`` (columns are grid unit vectors)."""
    return op(State.single(grid, np.eye(grid.n, dtype=complex), l, m)).parts


def _node_weights(real: Realization, grid: RadialGrid) -> np.ndarray:
    # positive node weights x^2 dx/dindex times the measure factor
    return real.measure_weights(grid.with_weights(grid.nodes**2 * grid.jac))


def ds_energy_sq_matrix(real: Realization, grid: RadialGrid, l: int, m: int = 0) -> np.ndarray:
    """``L04^2 + N^2`` on the partial wave ``(l, m)`` in the symmetrized basis.

    Each generator ``X`` is mapped to ``S = W^{1/2} X W^{-1/2}`` with the
    measure weights ``W`` and squared as ``S^dagger S`` (summing over the
    intermediate partial waves of ``N``), which is the square of a
    self-adjoint operator and nonnegative by construction.
    """
    sq = np.sqrt(_node_weights(real, grid))
    total = np.zeros((grid.n, grid.n), complex)
    ops = [tensor_generator(real, "L04")] + [tensor_generator(real, f"N{i}") for i in (1, 2, 3)]
    for op in ops:
        for blk in _blocks(op, grid, l, m).values():
            S = sq[:, None] * blk / sq[None, :]
            total += S.conj().T @ S
    return (total + total.conj().T) / 2


def ds_energy_apply(real: Realization, test: State, rtol: float = 1e-8) -> State:
    """``E_dS = (L04^2 + N^2)^{1/2}`` by spectral decomposition per partial wave.

    The operator commutes with ``M``, so it acts within each ``(l, m)``;
    eigenvalues below ``-rtol * max|eig|`` raise :class:`PositivityError`.
    """
    grid = test.grid
    sq = np.sqrt(_node_weights(real, grid))
    out = {}
    cache = {}
    for (l, m), v in test.parts.items():
        if l not in cache:
            ev, U = la.eigh(ds_energy_sq_matrix(real, grid, l, 0))
            scale = np.max(np.abs(ev))
            if ev[0] < -rtol * scale:
                raise PositivityError(f"L04^2 + N^2 has eigenvalue {ev[0]:.3e} "
                                      f"(scale {scale:.3e}) in partial wave l={l}")
            cache[l] = (U, np.sqrt(np.clip(ev, 0, None)))
        U, e = cache[l]
        vv = sq[(slice(None),) + (None,) * (v.ndim - 1)] * v
        res = U @ (e[(slice(None),) + (None,) * (v.ndim - 1)] * (U.conj().T @ vv))
        out[(l, m)] = res / sq[(slice(None),) + (None,) * (v.ndim - 1)]
    return State(grid, out)
