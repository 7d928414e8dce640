"""Three-dimensional functions as sums of radial functions times spherical harmonics.

A :class:`State` stores ``f(w) = sum_{lm} f_{lm}(|w|) Y_{lm}(w/|w|)`` as a
mapping from ``(l, m)`` to samples on a shared radial grid.  Sample arrays
may carry trailing axes, which lets one operator application act on many
columns at once (used to assemble matrices).

Vector operators are reduced exactly: the unit vector ``n = w/|w|`` couples
``l`` to ``l +- 1`` with Clebsch-Gordan coefficients, orbital angular
momentum acts within ``l``, and the gradient is
``d_i = n_i d/dr - (i/r)(n x L)_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics.grids import RadialGrid, derivative_matrix

AXES = ("x", "y", "z")


def _cg_up(l, m, q):
    """``<l m 1 q | l+1 m+q>``."""
    if q == 1:
        return np.sqrt((l + m + 1) * (l + m + 2) / ((2 * l + 1) * (2 * l + 2)))
    if q == 0:
        return np.sqrt((l - m + 1) * (l + m + 1) / ((2 * l + 1) * (l + 1)))
    return np.sqrt((l - m + 1) * (l - m + 2) / ((2 * l + 1) * (2 * l + 2)))


def _cg_down(l, m, q):
    """``<l m 1 q | l-1 m+q>`` (zero for l = 0)."""
    if l == 0:
        return 0.0
    if q == 1:
        return np.sqrt(max((l - m) * (l - m - 1), 0) / (2 * l * (2 * l + 1)))
    if q == 0:
        return -np.sqrt((l - m) * (l + m) / (l * (2 * l + 1)))
    return np.sqrt(max((l + m) * (l + m - 1), 0) / (2 * l * (2 * l + 1)))


def unit_vector_coefficients(l: int, m: int, q: int):
    """``[(L, M, c)]`` with ``n_q Y_lm = sum c Y_LM`` for the spherical component ``q``."""
    out = []
    M = m + q
    for L, cg, c0 in ((l + 1, _cg_up(l, m, q), _cg_up(l, 0, 0)),
                      (l - 1, _cg_down(l, m, q), _cg_down(l, 0, 0))):
        if L < 0 or abs(M) > L:
            continue
        c = np.sqrt((2 * l + 1) / (2 * L + 1)) * c0 * cg
        if c != 0:
            out.append((L, M, c))
    return out


class State:
    """Partial-wave expansion of a 3D function on a radial grid."""

    __slots__ = ("grid", "parts")

    def __init__(self, grid: RadialGrid, parts: dict | None = None):
        self.grid = grid
        self.parts = {}
        for key, v in (parts or {}).items():
            v = np.asarray(v, dtype=complex)
            if v.shape[0] != grid.n:
                raise ValueError("sample array does not match the grid")
            self.parts[key] = v

    @classmethod
    def single(cls, grid: RadialGrid, values, l: int = 0, m: int = 0) -> "State":
        if l < 0 or abs(m) > l:
            raise ValueError(f"invalid angular labels l={l}, m={m}")
        return cls(grid, {(l, m): values})

    def copy(self) -> "State":
        return State(self.grid, {k: v.copy() for k, v in self.parts.items()})

    def _combine(self, other: "State", sign: float) -> "State":
        if other.grid is not self.grid:
            raise ValueError("states live on different grids")
        out = {k: v.copy() for k, v in self.parts.items()}
        for k, v in other.parts.items():
            out[k] = out[k] + sign * v if k in out else sign * v
        return State(self.grid, out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c):
        return State(self.grid, {k: c * v for k, v in self.parts.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def radial(self, g) -> "State":
        """Multiply every partial wave by the radial samples ``g``."""
        g = np.asarray(g)
        return State(self.grid, {k: _bcast(g, v) * v for k, v in self.parts.items()})

    def norm2(self, weights=None) -> np.ndarray:
        """``sum_lm int |f_lm|^2 w`` with ``w`` the grid's ``x^2 dx`` weights by default."""
        w = self.grid.weights if weights is None else np.asarray(weights)
        tot = 0.0
        for v in self.parts.values():
            tot = tot + np.tensordot(w, np.abs(v) ** 2, axes=(0, 0))
        return tot

    def norm(self, weights=None):
        return np.sqrt(self.norm2(weights))

    def inner(self, other: "State", weights=None):
        w = self.grid.weights if weights is None else np.asarray(weights)
        tot = 0.0
        for k, v in self.parts.items():
            if k in other.parts:
                tot = tot + np.tensordot(w, np.conj(v) * other.parts[k], axes=(0, 0))
        return tot

    def l_max(self) -> int:
        return max((l for l, _ in self.parts), default=0)

    def __repr__(self):
        return f"State(n={self.grid.n}, waves={sorted(self.parts)})"


def _bcast(g, v):
    return g.reshape(g.shape + (1,) * (v.ndim - g.ndim))


# --- angular operators --------------------------------------------------------

def unit_vector_spherical(f: State, q: int) -> State:
    out: dict = {}
    for (l, m), v in f.parts.items():
        for L, M, c in unit_vector_coefficients(l, m, q):
            out[(L, M)] = out[(L, M)] + c * v if (L, M) in out else c * v
    return State(f.grid, out)


def unit_vector(f: State, axis: int) -> State:
    """Multiply by the Cartesian component ``n_axis`` of ``w/|w|``."""
    if axis == 2:
        return unit_vector_spherical(f, 0)
    plus = unit_vector_spherical(f, 1)
    minus = unit_vector_spherical(f, -1)
    if axis == 0:
        return (minus - plus) * (1 / np.sqrt(2))
    return (minus + plus) * (1j / np.sqrt(2))


def _ladder(f: State, sign: int) -> State:
    out: dict = {}
    for (l, m), v in f.parts.items():
        m2 = m + sign
        if abs(m2) > l:
            continue
        c = np.sqrt(l * (l + 1) - m * m2)
        out[(l, m2)] = out[(l, m2)] + c * v if (l, m2) in out else c * v
    return State(f.grid, out)


def angular_momentum(f: State, axis: int) -> State:
    """Orbital angular momentum ``L = -i w x grad`` (component ``axis``)."""
    if axis == 2:
        return State(f.grid, {(l, m): m * v for (l, m), v in f.parts.items()})
    up, dn = _ladder(f, 1), _ladder(f, -1)
    if axis == 0:
        return (up + dn) * 0.5
    return (up - dn) * (-0.5j)


def angular_momentum_sq(f: State) -> State:
    return State(f.grid, {(l, m): l * (l + 1) * v for (l, m), v in f.parts.items()})


def _n_cross_L(f: State, axis: int) -> State:
    j, k = (axis + 1) % 3, (axis + 2) % 3
    return unit_vector(angular_momentum(f, k), j) - unit_vector(angular_momentum(f, j), k)


# --- radial pieces ------------------------------------------------------------

@dataclass(frozen=True)
class RadialCalculus:
    """Differentiation on a fixed grid (cached sparse matrix)."""

    grid: RadialGrid

    def __post_init__(self):
        object.__setattr__(self, "_d", derivative_matrix(self.grid))

    def d_dr(self, f: State) -> State:
        return State(f.grid, {k: self._d @ v for k, v in f.parts.items()})

    def r_d_dr(self, f: State) -> State:
        """``w . grad`` (the Euler operator)."""
        return self.d_dr(f).radial(self.grid.nodes)

    def gradient(self, f: State, axis: int) -> State:
        """Cartesian ``d/dw_axis``."""
        r = self.grid.nodes
        return unit_vector(self.d_dr(f), axis) - _n_cross_L(f, axis).radial(1j / r)

    def position(self, f: State, axis: int) -> State:
        """Multiply by ``w_axis``."""
        return unit_vector(f, axis).radial(self.grid.nodes)
