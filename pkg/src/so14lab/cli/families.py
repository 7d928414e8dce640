"""Discretized operator families addressed by ``so14lab spectrum`` and ``compare``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..many_body import MassOperatorSpec, build_mass_operator
from ..numerics.grids import RadialGrid, make_linear_grid, make_log_grid
from ..params import SystemParams
from ..spectral import (PotentialSpec, discretize_m0, discretize_nr_coordinate,
                        discretize_nr_momentum, eigenfunction_closed_form,
                        free_eigenfunction_coordinate, free_eigenfunction_momentum,
                        solve_radial_interacting)
from ..spectral.discrete import nr_phase

# name -> (grid kind, representation, description)
FAMILIES = {
    "m0": ("log", "momentum", "(i/R)(k d/dk + 3/2)"),
    "m_nr": ("log", "momentum", "k^2/2m12 + (i/R)(k d/dk + 3/2)"),
    "m_nr_coordinate": ("log", "coordinate", "-Delta/2m12 - (i/R)(r d/dr + 3/2)"),
    "m_hat": ("log", "coordinate", "-Delta/2m12 + V - (i/R)(r d/dr + 3/2)"),
    "galilean": ("linear", "coordinate", "-Delta/2m12 + V"),
    "first_order": ("log", "coordinate", "m1 + m2 - (i/R)(r d/dr + 3/2)"),
    "relativistic_tilde": ("log", "momentum",
                           "(m1^2+k^2)^1/2 + (m2^2+k^2)^1/2 + (i/R)(k d/dk + 3/2)"),
}


class FamilyError(ValueError):
    """A family cannot be built from the given configuration (usage error)."""


@dataclass(frozen=True)
class Discretized:
    name: str
    grid: RadialGrid
    matrix: np.ndarray
    variable: str        # "chi" (x^{3/2} f on log grids) or "u" (r f on linear grids)

    def to_function(self, vec: np.ndarray) -> np.ndarray:
        x = self.grid.nodes
        return vec / (x**1.5 if self.variable == "chi" else x)


def make_grid(name: str, r_min: float, r_max: float, n: int) -> RadialGrid:
    if FAMILIES[name][0] == "linear":
        return make_linear_grid(r_max / n, r_max, n)
    return make_log_grid(r_min, r_max, n)


def build(name: str, params: SystemParams, grid: RadialGrid, l: int = 0,
          V: PotentialSpec | None = None) -> Discretized:
    if name not in FAMILIES:
        raise FamilyError(f"unknown operator form {name!r}; expected one of {sorted(FAMILIES)}")
    if name in ("m_hat", "galilean") and V is None:
        raise FamilyError(f"form {name!r} needs a potential (set potential.kind)")
    if name == "m0":
        op = discretize_m0(grid, params)
    elif name == "m_nr":
        op = discretize_nr_momentum(grid, params)
    elif name == "m_nr_coordinate":
        op = discretize_nr_coordinate(grid, params, l, None)
    elif name == "m_hat":
        op = discretize_nr_coordinate(grid, params, l, V)
    elif name == "galilean":
        op = discretize_nr_coordinate(grid, params, l, V, cosmological=False)
    else:
        rep = FAMILIES[name][1]
        spec = MassOperatorSpec(name, params, rep)
        mat = build_mass_operator(spec).dense(grid)
        return Discretized(name, grid, np.asarray(mat), "chi")
    return Discretized(name, grid, op.matrix, op.variable)


def eigenfunction(name: str, lam: float, params: SystemParams, grid: RadialGrid, l: int = 0,
                  V: PotentialSpec | None = None, disc: Discretized | None = None):
    """Samples of the generalized eigenfunction at ``lam`` and where they came from.

    Closed forms are used where one exists; otherwise the discretized
    eigenvector with the nearest eigenvalue is returned.
    """
    x = grid.nodes
    if name == "first_order":
        return free_eigenfunction_coordinate(lam, params, x), "closed_form"
    if name == "m_nr":
        return free_eigenfunction_momentum(lam, l, params, x), "closed_form"
    if name == "m0":
        psi = free_eigenfunction_momentum(lam, l, params, x) * np.exp(-1j * nr_phase(x, params))
        return psi, "closed_form"
    if name == "m_nr_coordinate":
        return eigenfunction_closed_form(lam, l, params, x), "closed_form"
    if name == "m_hat":
        return solve_radial_interacting(V, lam, l, params, grid).values, "radial_ode"
    disc = disc or build(name, params, grid, l, V)
    w, v = np.linalg.eigh(disc.matrix)
    j = int(np.argmin(np.abs(w - lam)))
    vec = v[:, j]
    vec = vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))]))
    return disc.to_function(vec), f"eigenvector(lambda={w[j]:.12g})"
