"""Radial grids, grid functions and finite-difference differentiation.

Every grid is the image of a uniform index coordinate ``t = 0, 1, ..., n-1``
under a smooth map ``x(t)``.  Derivatives are taken in ``t`` with high-order
finite differences and converted with the chain rule, and the quadrature
weights for ``int f(x) x^2 dx`` come from integrating local interpolants of
``f`` against ``x^2`` exactly.  A log-uniform grid is therefore uniform in
``ln x`` and a linear grid is uniform in ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

FD_ACCURACY = 8
QUAD_POINTS = 8


def _readonly(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


def interpolatory_weights(nodes, npts: int = QUAD_POINTS) -> np.ndarray:
    """Weights for ``int f(x) x^2 dx`` from piecewise Lagrange interpolation.

    On each interval the integrand ``f`` is replaced by the interpolant through
    ``npts`` neighbouring nodes and integrated against ``x^2`` exactly, so the
    rule is exact for polynomials ``f`` of degree ``< npts``.
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size
    k = min(npts, n)
    nint = n - 1
    start = np.clip(np.arange(nint) - (k // 2 - 1), 0, n - k)
    idx = start[:, None] + np.arange(k)[None, :]
    a = x[:-1]
    d = np.diff(x)
    s = (x[idx] - a[:, None]) / d[:, None]
    p = np.arange(k)
    vand = s[:, None, :] ** p[None, :, None]
    a_, d_ = a[:, None], d[:, None]
    mom = d_ * (a_**2 / (p + 1) + 2 * a_ * d_ / (p + 2) + d_**2 / (p + 3))
    loc = np.linalg.solve(vand, mom[:, :, None])[:, :, 0]
    w = np.zeros(n)
    np.add.at(w, idx.ravel(), loc.ravel())
    return w


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Positive, strictly increasing sample points with ``x^2 dx`` weights.

    ``jac`` holds ``dx/dt`` for the uniform index coordinate ``t``.  Composite
    grids (several pieces glued at shared nodes) carry ``jac = None`` and
    support quadrature only.
    """

    nodes: np.ndarray
    weights: np.ndarray
    spacing_kind: str
    jac: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs a 1-D array of at least two nodes")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be positive and strictly increasing")
        object.__setattr__(self, "nodes", _readonly(nodes))
        object.__setattr__(self, "weights", _readonly(np.asarray(self.weights, dtype=float)))
        if self.jac is not None:
            object.__setattr__(self, "jac", _readonly(np.asarray(self.jac, dtype=float)))

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def rho(self) -> np.ndarray:
        return np.log(self.nodes)

    @property
    def step(self) -> float:
        """Uniform step in the generating coordinate (``ln x`` or ``x``)."""
        if self.spacing_kind == "log-uniform":
            return float(self.rho[1] - self.rho[0])
        if self.spacing_kind == "linear":
            return float(self.nodes[1] - self.nodes[0])
        raise ValueError(f"no uniform step for {self.spacing_kind!r} grid")

    def integrate(self, values) -> complex | float:
        """``int f(x) x^2 dx`` over the grid span."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def with_weights(self, weights, kind: str | None = None) -> "RadialGrid":
        return RadialGrid(self.nodes, weights, kind or self.spacing_kind, self.jac)


def make_log_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    """Log-uniform grid on ``[r_min, r_max]``."""
    if not (r_min > 0 and r_max > r_min):
        raise ValueError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if n < 2:
        raise ValueError("need n >= 2")
    h = np.log(r_max / r_min) / (n - 1)
    nodes = r_min * np.exp(h * np.arange(n))
    nodes[-1] = r_max
    jac = h * nodes
    return RadialGrid(nodes, interpolatory_weights(nodes), "log-uniform", jac)


def make_linear_grid(x_min: float, x_max: float, n: int) -> RadialGrid:
    """Uniform grid on ``[x_min, x_max]`` with ``x_min > 0``."""
    if not (x_min > 0 and x_max > x_min):
        raise ValueError(f"need 0 < x_min < x_max, got {x_min}, {x_max}")
    if n < 2:
        raise ValueError("need n >= 2")
    nodes = np.linspace(x_min, x_max, n)
    dx = (x_max - x_min) / (n - 1)
    jac = np.full(n, dx)
    return RadialGrid(nodes, interpolatory_weights(nodes), "linear", jac)


def make_loglinear_grid(r_min: float, r_max: float, n: int, r_switch: float) -> RadialGrid:
    """Grid uniform in ``t = r + r_switch * ln r``.

    Spacing is log-uniform well below ``r_switch`` and linear well above it,
    which suits functions that are smooth in ``ln r`` near the origin but
    oscillate with growing frequency at large r.
    """
    if not (r_min > 0 and r_max > r_min and r_switch > 0):
        raise ValueError(f"need 0 < r_min < r_max and r_switch > 0, got {r_min}, {r_max}, {r_switch}")
    if n < 2:
        raise ValueError("need n >= 2")
    t0 = r_min + r_switch * np.log(r_min)
    t1 = r_max + r_switch * np.log(r_max)
    t = np.linspace(t0, t1, n)
    # r + s ln r = t  <=>  r = s W(exp(t/s) / s); use logs to avoid overflow
    nodes = np.empty(n)
    for i, ti in enumerate(t):
        nodes[i] = _solve_loglinear(ti, r_switch)
    nodes[0], nodes[-1] = r_min, r_max
    jac = (t1 - t0) / (n - 1) / (1 + r_switch / nodes)
    return RadialGrid(nodes, interpolatory_weights(nodes), "mapped", jac)


def _solve_loglinear(t, s):
    # Newton on g(u) = e^u + s u - t with u = ln r; g is convex and increasing
    u = np.log(max(t, 1.0)) if t > s else (t / s)
    for _ in range(100):
        eu = np.exp(u)
        du = (eu + s * u - t) / (eu + s)
        u -= du
        if abs(du) < 1e-15 * max(1.0, abs(u)):
            break
    return float(np.exp(u))


def map_grid(grid: RadialGrid, fn, dfn) -> RadialGrid:
    """Push ``grid`` forward through a monotone increasing map ``y = fn(x)``."""
    if grid.jac is None:
        raise ValueError("cannot map a composite grid")
    x = grid.nodes
    y = fn(x)
    jac = dfn(x) * grid.jac
    return RadialGrid(y, interpolatory_weights(y), "mapped", jac)


def concat_grids(*pieces: RadialGrid) -> RadialGrid:
    """Glue grids that share their junction nodes into a quadrature-only grid."""
    nodes = [pieces[0].nodes]
    weights = [pieces[0].weights.copy()]
    for prev, nxt in zip(pieces, pieces[1:]):
        if not np.isclose(prev.nodes[-1], nxt.nodes[0], rtol=1e-13, atol=0):
            raise ValueError("composite pieces must share junction nodes")
        weights[-1][-1] += nxt.weights[0]
        nodes.append(nxt.nodes[1:])
        weights.append(nxt.weights[1:].copy())
    return RadialGrid(np.concatenate(nodes), np.concatenate(weights), "composite", None)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of ``f(|w|)`` in partial wave ``(l, m)``."""

    grid: RadialGrid
    values: np.ndarray
    l: int = 0
    m: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[0] != self.grid.n:
            raise ValueError("values do not match grid size")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid angular labels l={self.l}, m={self.m}")
        object.__setattr__(self, "values", _readonly(v))

    def norm2(self) -> float:
        return float(np.real(self.grid.integrate(np.abs(self.values) ** 2)))

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def inner(self, other: "GridFunction") -> complex:
        """``<self, other>`` with the grid measure, antilinear in ``self``."""
        return complex(self.grid.integrate(np.conj(self.values) * other.values))

    def replace(self, values, **kw) -> "GridFunction":
        kw.setdefault("l", self.l)
        kw.setdefault("m", self.m)
        kw.setdefault("meta", dict(self.meta))
        return GridFunction(self.grid, values, **kw)

    def __add__(self, other):
        return self.replace(self.values + other.values)

    def __sub__(self, other):
        return self.replace(self.values - other.values)

    def __mul__(self, c):
        return self.replace(self.values * c)

    __rmul__ = __mul__


def fd_weights(z: float, x, m: int) -> np.ndarray:
    """Fornberg's weights for derivatives 0..m at ``z`` from nodes ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


@lru_cache(maxsize=64)
def index_fd_matrix(n: int, deriv: int = 1, accuracy: int = FD_ACCURACY,
                    boundary: str = "one-sided") -> sp.csr_matrix:
    """Derivative matrix in the unit-spaced index coordinate.

    ``boundary="one-sided"`` shifts the stencil inwards near the edges and
    keeps full order everywhere.  ``boundary="zero"`` truncates the central
    stencil, i.e. assumes zero samples beyond the ends; for ``deriv=1`` the
    result is exactly antisymmetric.
    """
    if boundary not in ("one-sided", "zero"):
        raise ValueError(f"unknown boundary {boundary!r}")
    half = (accuracy + deriv - 1) // 2
    width = 2 * half + 1
    if n < width:
        raise ValueError(f"grid of {n} nodes too small for a {width}-point stencil")
    central = fd_weights(0.0, np.arange(-half, half + 1), deriv)
    rows, cols, vals = [], [], []
    for i in range(n):
        if boundary == "zero" or half <= i < n - half:
            offs = np.arange(-half, half + 1)
            keep = (i + offs >= 0) & (i + offs < n)
            w = central[keep]
            offs = offs[keep]
        else:
            start = min(max(i - half, 0), n - width)
            offs = np.arange(start, start + width) - i
            w = fd_weights(0.0, offs, deriv)
        rows.extend([i] * offs.size)
        cols.extend(i + offs)
        vals.extend(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def derivative_matrix(grid: RadialGrid, boundary: str = "one-sided") -> sp.csr_matrix:
    """``d/dx`` on ``grid`` as a sparse matrix."""
    if grid.jac is None:
        raise ValueError("composite grids do not support differentiation")
    return sp.diags(1.0 / grid.jac) @ index_fd_matrix(grid.n, 1, FD_ACCURACY, boundary)


def ddx(grid: RadialGrid, values) -> np.ndarray:
    """First derivative of samples (first axis) with respect to the node coordinate."""
    return derivative_matrix(grid) @ np.asarray(values)


def differentiate(f: GridFunction, order: int = 1) -> GridFunction:
    """Derivative of ``f`` with respect to the node coordinate."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if f.grid.n < 8:
        raise ValueError("grid too small for differentiation (< 8 nodes)")
    if f.grid.n < FD_ACCURACY + 1:
        d = sp.diags(1.0 / f.grid.jac) @ index_fd_matrix(f.grid.n, 1, f.grid.n - 2)
    else:
        d = derivative_matrix(f.grid)
    v = d @ f.values
    if order == 2:
        v = d @ v
    return f.replace(v)
