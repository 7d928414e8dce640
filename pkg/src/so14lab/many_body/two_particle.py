"""Two-particle generators as differential operators in six variables.

States are :class:`~so14lab.many_body.polygauss.PolyGaussian` functions of
``(X, r)`` (stereographic forms) or ``(P, k)`` (the slow-particle form).
Three generator sets are provided:

``sum``
    the tensor-product generators: the single-particle stereographic
    generators of each particle, with ``x1 = X + a2 r``, ``x2 = X - a1 r``,
    ``p1 = a1 P + k``, ``p2 = a2 P - k`` (``a_j = m_j / (m1 + m2)``), added.
``exact``
    the same operators written out in ``(X, r)``, spin terms dropped.
``slow``
    the small-velocity form in ``(P, k)``; only approximately a
    representation, so its commutator residuals are reported, not asserted.

Each set maps ``M1..3, N1..3, B1..3, L04`` (the component ``L^{04}``) and,
for the stereographic sets, ``Lpm, Qp1..3, Qm1..3`` to callables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..params import SystemParams
from ..so14_generators.generators import (INDEX_PAIRS, CommutatorReport, structure_rhs,
                                          tensor_components)
from .polygauss import PolyGaussian

FORMS = ("exact", "sum", "slow")
CYCLIC = ((1, 2), (2, 0), (0, 1))


def _sum(terms):
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


# --- elementary operators in (X, r) or (P, k) --------------------------------

def _pos(offset):
    return lambda f, i: f.times(offset + i)


def _mom(offset):
    return lambda f, i: f.deriv(offset + i) * -1j


def _combo(*pairs):
    """Linear combination ``sum c * op`` of vector operators ``op(f, i)``."""
    return lambda f, i: _sum([op(f, i) * c for c, op in pairs if c != 0])


def _dot(x, y, f):
    """``sum_i x_i (y_i f)``."""
    return _sum([x(y(f, i), i) for i in range(3)])


def _orbital(x, p):
    """``(x cross p)_axis``."""
    def op(f, axis):
        j, k = CYCLIC[axis]
        return x(p(f, k), j) - x(p(f, j), k)
    return op


def _stereo_table(mu, R, x, p):
    """Spinless stereographic generators from vector operators ``x`` and ``p``."""
    ops = {}
    for i in range(3):
        ops[f"M{i + 1}"] = (lambda f, i=i: _orbital(x, p)(f, i))
        ops[f"Qp{i + 1}"] = (lambda f, i=i: p(f, i) * (-2 * R))
        ops[f"Qm{i + 1}"] = (lambda f, i=i: (x(f, i) * (-2 * mu + 3j) + _dot(x, x, p(f, i))
                                             - x(_dot(x, p, f), i) * 2) * (1 / (2 * R)))
    ops["Lpm"] = lambda f: f * (-2 * mu + 3j) - _dot(x, p, f) * 2
    return ops


def _derived(ops):
    """Add ``N``, ``B`` and ``L04 = L^{04}`` to a light-cone table."""
    for i in (1, 2, 3):
        qp, qm = ops[f"Qp{i}"], ops[f"Qm{i}"]
        ops[f"N{i}"] = lambda f, qp=qp, qm=qm: (qp(f) - qm(f)) * 0.5
        ops[f"B{i}"] = lambda f, qp=qp, qm=qm: (qp(f) + qm(f)) * -0.5
    lpm = ops["Lpm"]
    ops["L04"] = lambda f: lpm(f) * -0.5
    return ops


def _fractions(params: SystemParams):
    m = params.masses
    if m.size != 2:
        raise ValueError("two-particle generators need exactly two particles")
    return m[0] / m.sum(), m[1] / m.sum()


def _sum_table(params: SystemParams):
    a1, a2 = _fractions(params)
    R = params.R
    X, r, P, k = _pos(0), _pos(3), _mom(0), _mom(3)
    one = _stereo_table(params.particles[0].signed_mu, R,
                        _combo((1.0, X), (a2, r)), _combo((a1, P), (1.0, k)))
    two = _stereo_table(params.particles[1].signed_mu, R,
                        _combo((1.0, X), (-a1, r)), _combo((a2, P), (-1.0, k)))
    return {lab: (lambda f, o=one[lab], t=two[lab]: o(f) + t(f)) for lab in one}


def _exact_table(params: SystemParams):
    a1, a2 = _fractions(params)
    R = params.R
    mu = sum(p.signed_mu for p in params.particles)
    M = params.total_mass
    X, r, P = _pos(0), _pos(3), _mom(0)
    dr = lambda f, i: f.deriv(3 + i)  # noqa: E731
    ops = {}
    ops["Lpm"] = lambda f: (f * mu + _dot(X, P, f)) * -2 + (_dot(r, dr, f) + f * 3) * 2j
    for i in range(3):
        ops[f"M{i + 1}"] = lambda f, i=i: _orbital(X, P)(f, i) + _orbital(r, _mom(3))(f, i)
        ops[f"Qp{i + 1}"] = lambda f, i=i: P(f, i) * (-2 * R)

        def qm(f, i=i):
            br = _sum([
                _dot(X, X, P(f, i)),
                _dot(r, r, P(f, i)) * (a1 * a2),
                _dot(r, X, dr(f, i)) * -2j,
                _dot(r, r, dr(f, i)) * (-1j * (a2 - a1)),
                X(_dot(X, P, f), i) * -2,
                r(_dot(r, P, f), i) * (-2 * a1 * a2),
                X(_dot(r, dr, f), i) * 2j,
                r(_dot(X, dr, f), i) * 2j,
                r(_dot(r, dr, f), i) * (2j * (a2 - a1)),
                X(f, i) * 6j,
                r(f, i) * (3j * (a2 - a1)),
            ])
            return X(f, i) * -M + br * (1 / (2 * R))
        ops[f"Qm{i + 1}"] = qm
    return ops


def _slow_table(params: SystemParams):
    """Small-velocity generators in ``(P, k)``; the printed ``L04`` is ``L_{04} = -L^{04}``."""
    R, M = params.R, params.total_mass
    P, k = _pos(0), _pos(3)
    dP = lambda f, i: f.deriv(i)  # noqa: E731
    dk = lambda f, i: f.deriv(3 + i)  # noqa: E731
    ops = {}
    for i in range(3):
        ops[f"M{i + 1}"] = (lambda f, i=i: _orbital(P, _mom(0))(f, i)
                            + _orbital(k, _mom(3))(f, i))
        ops[f"N{i + 1}"] = lambda f, i=i: dP(f, i) * (-1j * M)
        ops[f"B{i + 1}"] = lambda f, i=i: P(f, i) * R + dP(f, i) * (1j * M)
    ops["L04"] = lambda f: -(f * (R * M) + (_dot(k, dk, f) + f * 1.5) * 1j
                             + (_dot(P, dP, f) + f * 1.5) * 1j)
    return ops


@dataclass(frozen=True)
class GeneratorSet:
    """Ten (or seventeen) two-particle generators acting on :class:`PolyGaussian`."""

    form: str
    params: SystemParams
    variables: tuple
    ops: dict = field(repr=False)
    approximate: bool = False

    def __getitem__(self, label):
        return self.ops[label]

    @property
    def labels(self) -> tuple:
        return tuple(self.ops)

    def lab(self, a: int, b: int):
        return tensor_components(self.ops.__getitem__)(a, b)

    def commutator_residual(self, a: tuple, b: tuple, tests) -> CommutatorReport:
        la, lb = self.lab(*a), self.lab(*b)
        res = []
        for f in tests:
            d = la(lb(f)) - lb(la(f)) - structure_rhs(self.lab, a[0], a[1], b[0], b[1], f)
            res.append(d.norm() / f.norm())
        return CommutatorReport((a, b), np.array(res))

    def algebra_sweep(self, tests) -> list[CommutatorReport]:
        return [self.commutator_residual(p, q, tests)
                for i, p in enumerate(INDEX_PAIRS) for q in INDEX_PAIRS[i + 1:]]

    def casimir(self, f: PolyGaussian) -> PolyGaussian:
        """``I_2 = (L_{+-})^2/2 - (Q_+ Q_- + Q_- Q_+) - 2 M^2`` (stereographic sets)."""
        if "Lpm" not in self.ops:
            raise ValueError(f"the {self.form!r} set has no light-cone generators")
        g = self.ops
        out = g["Lpm"](g["Lpm"](f)) * 0.5
        for i in (1, 2, 3):
            qp, qm, m = g[f"Qp{i}"], g[f"Qm{i}"], g[f"M{i}"]
            out = out - qp(qm(f)) - qm(qp(f)) - m(m(f)) * 2
        return out

    def internal_spin_sq(self, f: PolyGaussian) -> PolyGaussian:
        """``S^2 = l(r)^2`` for spinless particles."""
        r, k = _pos(3), _mom(3)
        lr = _orbital(r, k)
        return _sum([lr(lr(f, i), i) for i in range(3)])

    def mass_dS_squared(self, f: PolyGaussian) -> PolyGaussian:
        """``M_dS^2 = I_2 / 2 + S^2 - 9/4``."""
        return self.casimir(f) * 0.5 + self.internal_spin_sq(f) - f * 2.25


def two_particle_generators(params: SystemParams, form: str = "exact") -> GeneratorSet:
    """Generators of a free two-particle system (spinless).

    ``form="exact"`` is the closed expression in ``(X, r)``;
    ``form="sum"`` adds the single-particle generators directly;
    ``form="slow"`` is the small-velocity set in ``(P, k)``, flagged as
    approximate.
    """
    if form == "exact":
        return GeneratorSet(form, params, ("X", "r"), _derived(_exact_table(params)))
    if form == "sum":
        return GeneratorSet(form, params, ("X", "r"), _derived(_sum_table(params)))
    if form == "slow":
        return GeneratorSet(form, params, ("P", "k"), _slow_table(params), approximate=True)
    raise ValueError(f"unknown generator form {form!r}; expected one of {FORMS}")


def additivity_residual(params: SystemParams, tests, labels=None) -> dict:
    """``||G_exact f - G_sum f|| / ||f||`` per label."""
    ex, sm = two_particle_generators(params, "exact"), two_particle_generators(params, "sum")
    labels = ex.labels if labels is None else labels
    return {lab: max((ex[lab](f) - sm[lab](f)).norm() / f.norm() for f in tests)
            for lab in labels}
