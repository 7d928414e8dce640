"""Single-particle generators of the de Sitter algebra in three realizations.

Spinless particles only.  The realizations act on functions of

* ``velocity_hyperboloid``: the velocity ``v`` (``v0 = (1 + v^2)^{1/2}``),
* ``sphere``: the point ``u`` of one hemisphere of the unit 3-sphere,
  ``u4 = hemisphere * (1 - u^2)^{1/2}``,
* ``stereographic``: the stereographic coordinate ``x`` of scale ``R``.

Generator labels follow the usual grouping ``M = (L23, L31, L12)``,
``N = (L01, L02, L03)``, ``B = -(L14, L24, L34)`` and ``L04``, plus the
light-cone set ``Lpm`` (``L_{+-}``), ``Qp1..3`` and ``Qm1..3`` built from
``x_{+-} = x4 +- x0``.  With lowered indices ``Q_+ = N - B``,
``Q_- = -(N + B)`` and ``L_{+-} = -2 L^{04}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..numerics.grids import RadialGrid
from ..operators import LinearOperatorSpec
from ..params import ParticleParams
from .angular import RadialCalculus, State, angular_momentum

REALIZATIONS = ("velocity_hyperboloid", "sphere", "stereographic")
VECTOR_KINDS = ("M", "N", "B", "Qp", "Qm")
LABELS = tuple(f"{k}{i}" for k in ("M", "N", "B") for i in (1, 2, 3)) + ("L04", "Lpm") \
    + tuple(f"{k}{i}" for k in ("Qp", "Qm") for i in (1, 2, 3))
# sign relating the printed L04 of each realization to the tensor component L^{04}:
# the velocity-hyperboloid form is the lower-index L_{04} = -L^{04}
L04_TENSOR_SIGN = {"velocity_hyperboloid": -1.0, "sphere": 1.0, "stereographic": 1.0}
ETA = np.diag([1.0, -1.0, -1.0, -1.0, -1.0])
INDEX_PAIRS = tuple(combinations(range(5), 2))

FORMULAS = {
    "velocity_hyperboloid": {
        "M": "-i v x d/dv",
        "N": "-i v0 d/dv",
        "B": "mu v + i[d/dv + v (v.d/dv) + 3/2 v]",
        "L04": "mu v0 + i v0 (v.d/dv + 3/2)",
    },
    "sphere": {
        "M": "-i u x d/du",
        "N": "i[d/du - u (u.d/du)] - (mu + 3i/2) u",
        "B": "i u4 d/du",
        "L04": "(mu + 3i/2) u4 + i u4 u.d/du",
    },
    "stereographic": {
        "M": "-i x x d/dx",
        "Lpm": "-2(mu + x.p) + 3i",
        "Qp": "-2 R p",
        "Qm": "(1/2R)[-2 mu x + x^2 p - 2 x (x.p) + 3i x]",
        "N": "(Q+ - Q-)/2",
        "B": "-(Q+ + Q-)/2",
        "L04": "-L+-/2",
    },
}


class UnsupportedGeneratorError(ValueError):
    """The requested generator has no direct form in this realization."""


@dataclass(frozen=True)
class Realization:
    """A realization of the spinless principal-series representation.

    ``hemisphere`` is the sign of ``u4`` for the sphere realization (the
    image of the velocity hyperboloid under ``u = -v/v0`` is the lower one,
    ``u4 = -1/v0``).
    """

    tag: str
    params: ParticleParams
    hemisphere: int = -1

    def __post_init__(self):
        if self.tag not in REALIZATIONS:
            raise ValueError(f"unknown realization {self.tag!r}; expected one of {REALIZATIONS}")
        if self.hemisphere not in (-1, 1):
            raise ValueError("hemisphere must be +1 or -1")

    @property
    def mu(self) -> float:
        return self.params.signed_mu

    @property
    def R(self) -> float:
        return self.params.R

    @property
    def variable(self) -> str:
        return {"velocity_hyperboloid": "v", "sphere": "u", "stereographic": "x"}[self.tag]

    def measure_weights(self, grid: RadialGrid) -> np.ndarray:
        """Quadrature weights of the invariant measure (``d^3v/v0``, ``d^3u/|u4|``, ``d^3x``)."""
        r = grid.nodes
        if self.tag == "velocity_hyperboloid":
            return grid.weights / np.sqrt(1 + r**2)
        if self.tag == "sphere":
            return grid.weights / np.sqrt(1 - r**2)
        return grid.weights


_CALCULUS: dict[int, tuple] = {}


def calculus(grid: RadialGrid) -> RadialCalculus:
    hit = _CALCULUS.get(id(grid))
    if hit is None or hit[0] is not grid:
        hit = (grid, RadialCalculus(grid))
        _CALCULUS[id(grid)] = hit
    return hit[1]


def parse_label(label: str):
    if label in ("L04", "Lpm"):
        return label, None
    kind, idx = label[:-1], label[-1]
    if kind not in VECTOR_KINDS or idx not in "123":
        raise ValueError(f"unknown generator label {label!r}")
    return kind, int(idx) - 1


# --- realization-specific actions ---------------------------------------------

def _velocity(real: Realization, kind, axis, f: State) -> State:
    c = calculus(f.grid)
    r = f.grid.nodes
    v0 = np.sqrt(1 + r**2)
    mu = real.mu
    if kind == "M":
        return angular_momentum(f, axis)
    if kind == "N":
        return c.gradient(f, axis).radial(-1j * v0)
    if kind == "B":
        euler = c.r_d_dr(f)
        return (c.position(f, axis) * (mu + 1.5j) + c.gradient(f, axis) * 1j
                + c.position(euler, axis) * 1j)
    if kind == "L04":
        return f.radial(mu * v0 + 1.5j * v0) + c.r_d_dr(f).radial(1j * v0)
    raise UnsupportedGeneratorError(f"{kind} has no direct form in the velocity realization")


def _sphere(real: Realization, kind, axis, f: State) -> State:
    c = calculus(f.grid)
    r = f.grid.nodes
    if np.any(r >= 1):
        raise ValueError("sphere realization needs |u| < 1 on the grid")
    u4 = real.hemisphere * np.sqrt(1 - r**2)
    a = real.mu + 1.5j
    if kind == "M":
        return angular_momentum(f, axis)
    if kind == "B":
        return c.gradient(f, axis).radial(1j * u4)
    if kind == "N":
        return (c.gradient(f, axis) * 1j - c.position(c.r_d_dr(f), axis) * 1j
                - c.position(f, axis) * a)
    if kind == "L04":
        return f.radial(a * u4) + c.r_d_dr(f).radial(1j * u4)
    raise UnsupportedGeneratorError(f"{kind} has no direct form in the sphere realization")


def _stereo(real: Realization, kind, axis, f: State) -> State:
    c = calculus(f.grid)
    r = f.grid.nodes
    mu, R = real.mu, real.R
    if kind == "M":
        return angular_momentum(f, axis)
    if kind == "Lpm":
        # -2(mu + x.p) + 3i with x.p = -i r d/dr
        return f * (-2 * mu + 3j) + c.r_d_dr(f) * 2j
    if kind == "Qp":
        return c.gradient(f, axis) * (2j * R)
    if kind == "Qm":
        grad = c.gradient(f, axis)
        xp = c.r_d_dr(f) * -1j
        out = (c.position(f, axis) * (-2 * mu + 3j) + grad.radial(-1j * r**2)
               - c.position(xp, axis) * 2)
        return out * (1 / (2 * R))
    if kind == "N":
        return (_stereo(real, "Qp", axis, f) - _stereo(real, "Qm", axis, f)) * 0.5
    if kind == "B":
        return (_stereo(real, "Qp", axis, f) + _stereo(real, "Qm", axis, f)) * -0.5
    if kind == "L04":
        return _stereo(real, "Lpm", None, f) * -0.5
    raise UnsupportedGeneratorError(kind)


_ACTIONS = {"velocity_hyperboloid": _velocity, "sphere": _sphere, "stereographic": _stereo}


def build_generator(real: Realization, label: str) -> LinearOperatorSpec:
    """The generator ``label`` of realization ``real`` as an operator on :class:`State`."""
    kind, axis = parse_label(label)
    if real.tag != "stereographic" and kind in ("Qp", "Qm", "Lpm"):
        raise UnsupportedGeneratorError(
            f"{label} is not given directly in the {real.tag} realization")
    action = _ACTIONS[real.tag]
    formula = FORMULAS[real.tag][kind]
    return LinearOperatorSpec(label, formula, real.variable,
                              lambda f: action(real, kind, axis, f),
                              meta={"realization": real.tag, "mu": real.mu, "R": real.R})


# --- tensor components L^{ab} -------------------------------------------------

def tensor_generator(real: Realization, label: str):
    """Like :func:`build_generator` but with ``L04`` meaning the component ``L^{04}``."""
    op = build_generator(real, label).apply
    if label == "L04" and L04_TENSOR_SIGN[real.tag] < 0:
        return lambda f: -op(f)
    return op


def tensor_components(get):
    """``(a, b) -> L^{ab}`` for a generator table.

    ``get(label)`` must return the callable for ``M1..3``, ``N1..3``,
    ``B1..3`` and ``L04``, the last one meaning the component ``L^{04}``.
    """
    def lab(a: int, b: int):
        if a == b:
            return lambda f: f * 0.0
        if a > b:
            op = lab(b, a)
            return lambda f: -op(f)
        if a == 0 and b == 4:
            return get("L04")
        if a == 0:
            return get(f"N{b}")
        if b == 4:
            op = get(f"B{a}")
            return lambda f: -op(f)
        # spatial: L23 = M1, L31 = M2, L12 = M3
        k = ({1, 2, 3} - {a, b}).pop()
        sign = 1.0 if (a, b) in ((2, 3), (1, 2)) else -1.0
        op = get(f"M{k}")
        return lambda f: op(f) * sign
    return lab


def lab_operator(real: Realization, a: int, b: int):
    """``L^{ab}`` (upper indices, ``a, b`` in 0..4) as a callable on states."""
    return tensor_components(lambda label: tensor_generator(real, label))(a, b)


def structure_rhs(lab, a, b, c, d, f):
    """``-i(eta^{ac} L^{bd} + eta^{bd} L^{ac} - eta^{ad} L^{bc} - eta^{bc} L^{ad}) f``."""
    out = f * 0.0
    for coef, (p, q) in ((ETA[a, c], (b, d)), (ETA[b, d], (a, c)),
                         (-ETA[a, d], (b, c)), (-ETA[b, c], (a, d))):
        if coef != 0 and p != q:
            out = out + lab(p, q)(f) * coef
    return out * -1j


def commutation_rhs(real: Realization, a, b, c, d, f: State) -> State:
    return structure_rhs(lambda p, q: lab_operator(real, p, q), a, b, c, d, f)


@dataclass(frozen=True)
class CommutatorReport:
    pair: tuple
    residuals: np.ndarray

    @property
    def max(self) -> float:
        return float(np.max(self.residuals))

    @property
    def mean(self) -> float:
        return float(np.mean(self.residuals))


def commutator_residual(real: Realization, a: tuple, b: tuple, tests,
                        weights=None) -> CommutatorReport:
    """``||[L^a, L^b] f - rhs f|| / ||f||`` for each test state.

    ``a`` and ``b`` are index pairs such as ``(0, 1)``.  The norm uses the
    realization's invariant measure unless ``weights`` are given.
    """
    la, lb = lab_operator(real, *a), lab_operator(real, *b)
    res = []
    for f in tests:
        w = real.measure_weights(f.grid) if weights is None else weights
        lhs = la(lb(f)) - lb(la(f))
        d = lhs - commutation_rhs(real, a[0], a[1], b[0], b[1], f)
        res.append(float(d.norm(w) / f.norm(w)))
    return CommutatorReport((a, b), np.array(res))


def algebra_sweep(real: Realization, tests, weights=None) -> list[CommutatorReport]:
    """All 45 independent pairs of ``L^{ab}``."""
    return [commutator_residual(real, p, q, tests, weights)
            for i, p in enumerate(INDEX_PAIRS) for q in INDEX_PAIRS[i + 1:]]


# --- Casimir ------------------------------------------------------------------

def casimir_eigenvalue(mu: float) -> float:
    """``2(mu^2 + 9/4)`` for spin 0."""
    return 2.0 * (mu**2 + 2.25)


@dataclass(frozen=True)
class CasimirCheck:
    expected: float
    residual: float
    rayleigh: complex


def casimir_apply(real: Realization, f: State, weights=None):
    """``I_2 = -L_ab L^ab`` applied to ``f`` and checked against ``2(mu^2 + 9/4)``.

    In the stereographic realization the light-cone form
    ``(L_{+-})^2 / 2 - (Q_+ Q_- + Q_- Q_+) - 2 M^2`` is used directly.
    """
    w = real.measure_weights(f.grid) if weights is None else weights
    if real.tag == "stereographic":
        g = lambda lab: build_generator(real, lab).apply  # noqa: E731
        lpm = g("Lpm")
        out = lpm(lpm(f)) * 0.5
        for i in (1, 2, 3):
            qp, qm, m = g(f"Qp{i}"), g(f"Qm{i}"), g(f"M{i}")
            out = out - qp(qm(f)) - qm(qp(f)) - m(m(f)) * 2
    else:
        out = f * 0.0
        for a, b in INDEX_PAIRS:
            op = lab_operator(real, a, b)
            out = out - op(op(f)) * (2 * ETA[a, a] * ETA[b, b])
    expected = casimir_eigenvalue(real.mu)
    resid = float((out - f * expected).norm(w) / f.norm(w))
    rq = complex(f.inner(out, w) / f.norm2(w))
    return out, CasimirCheck(expected, resid, rq)
