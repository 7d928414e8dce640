"""Free continuum eigenfunctions: closed forms, asymptotics and radial operators.

Two eigenvalue conventions coexist, as in the underlying theory.  The
first-order mass operator ``M = m1 + m2 - (i/R)(r d/dr + 3/2)`` is labelled by
its full eigenvalue, while the nonrelativistic operator ``M_nr`` (the mass
minus ``m1 + m2``) is labelled by the excess ``lambda``.  Every function below
states which one it takes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics.grids import GridFunction, differentiate
from ..numerics.special import hyp1f1_complex, loggamma_complex
from ..params import SystemParams


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError(f"{name} must be positive")
    return x


def free_eigenfunction_coordinate(lam: float, params: SystemParams, r):
    """Eigenfunction of the first-order mass operator with full eigenvalue ``lam``.

    ``phi(r) = r^{-1} (R / 2 pi r)^{1/2} exp[i R (lam - m1 - m2) ln r]``.
    """
    r = _positive(r, "r")
    R = params.R
    beta = R * (lam - params.total_mass)
    return np.sqrt(R / (2 * np.pi * r)) / r * np.exp(1j * beta * np.log(r))


def free_eigenfunction_momentum(lam: float, l: int, params: SystemParams, k):
    """Momentum eigenfunction of ``M_nr`` for the excess eigenvalue ``lam``.

    The same function serves every partial wave; ``l`` is accepted for
    symmetry with the coordinate-space functions and ignored.
    """
    k = _positive(k, "k")
    R, m = params.R, params.m12
    return np.sqrt(R / (2 * np.pi * k)) / k * np.exp(1j * R * (k**2 / (4 * m) - lam * np.log(k)))


def _kummer_params(lam, l, params):
    a = l / 2 + 0.75 - 0.5j * lam * params.R
    b = l + 1.5
    return a, b


def _log_prefactor(lam, l, params, r):
    """Log of everything in the closed form except ``(-i)^l`` and the 1F1 factor."""
    R = params.R
    g = params.gamma
    a, b = _kummer_params(lam, l, params)
    return (0.5 * np.log(R / (2 * np.pi * r)) - np.log(2) - loggamma_complex(b)
            + (1j * lam * R - 1) * np.log(g) + (l + 0.5) * np.log(r / (2 * g))
            + loggamma_complex(a))


def kummer_argument(params: SystemParams, r):
    """``z = -r^2 / (4 gamma^2) = -i m12 r^2 / R`` (purely imaginary, negative)."""
    return -np.asarray(r, dtype=float) ** 2 / (4 * params.gamma_sq)


def eigenfunction_closed_form(lam: float, l: int, params: SystemParams, r):
    """Radial eigenfunction of ``M_nr`` in partial wave ``l`` from the 1F1 closed form.

    This is the spherical Hankel transform of the momentum eigenfunction,
    normalized to ``delta(lam - lam')``.
    """
    r = _positive(r, "r")
    a, b = _kummer_params(lam, l, params)
    logpre = _log_prefactor(lam, l, params, r)
    return (-1j) ** l * np.exp(logpre) * hyp1f1_complex(a, b, kummer_argument(params, r))


def cosmological_phase_factor(lam: float, l: int, params: SystemParams) -> complex:
    """``2^{-i R lam} Gamma(l/2 + 3/4 - i lam R/2) / Gamma(l/2 + 3/4 + i lam R/2)``; unit modulus."""
    a, _ = _kummer_params(lam, l, params)
    R = params.R
    return complex(np.exp(-1j * R * lam * np.log(2) + loggamma_complex(a)
                          - loggamma_complex(np.conj(a))))


@dataclass(frozen=True)
class AsymptoticForm:
    """Large-r expansion of the free radial eigenfunction.

    ``cosmological`` is the ``r^{-3/2} r^{i lam R}`` wave (whose leading term
    is the familiar form with the unit-modulus Gamma-ratio phase) and ``chirp``
    is the ``r^{-3/2} exp(-i m12 r^2 / R) r^{-i lam R}`` wave of equal
    amplitude coming from the stationary point ``k = 2 m12 r / R`` of the
    momentum integral.  ``error_estimate`` is the size of the first omitted
    term relative to ``|cosmological| + |chirp|``.
    """

    r: np.ndarray
    cosmological: np.ndarray
    chirp: np.ndarray
    error_estimate: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.cosmological + self.chirp


def eigenfunction_asymptotic(lam: float, l: int, params: SystemParams, r,
                             terms: int = 8) -> AsymptoticForm:
    """Large-r expansion keeping ``terms`` terms of each sector's series.

    ``terms=1`` gives the leading behaviour; more terms extend the validity
    towards the stationary-phase scale ``r ~ (R / m12)^{1/2}``.
    """
    if terms < 1:
        raise ValueError("terms must be at least 1")
    r = _positive(r, "r")
    a, b = _kummer_params(lam, l, params)
    z = kummer_argument(params, r) + 0j
    lz = np.log(z)
    logpre = _log_prefactor(lam, l, params, r)
    lgb = loggamma_complex(b)
    phase = (-1j) ** l
    # z lies on the negative imaginary axis, where the e^{-i pi a} sector applies
    cos_lead = phase * np.exp(logpre + lgb - loggamma_complex(b - a) - 1j * np.pi * a - a * lz)
    chirp_lead = phase * np.exp(logpre + lgb - loggamma_complex(a) + z + (a - b) * lz)

    def series(p, q, w):
        s = np.ones_like(w)
        t = np.ones_like(w)
        for n in range(terms - 1):
            t = t * (p + n) * (q + n) / (n + 1) * w
            s = s + t
        nxt = t * (p + terms - 1) * (q + terms - 1) / terms * w
        return s, nxt

    s_cos, n_cos = series(a, a - b + 1, -1 / z)
    s_chirp, n_chirp = series(1 - a, b - a, 1 / z)
    cos = cos_lead * s_cos
    chirp = chirp_lead * s_chirp
    scale = np.abs(cos_lead) + np.abs(chirp_lead)
    err = (np.abs(cos_lead * n_cos) + np.abs(chirp_lead * n_chirp)) / scale
    return AsymptoticForm(r, cos, chirp, err)


# --- radial operators acting on sampled functions ---------------------------

def first_order_mass_apply(f: GridFunction, params: SystemParams) -> GridFunction:
    """``(m1 + m2) f - (i/R)(r f' + 3/2 f)`` (angular momentum plays no role)."""
    r = f.grid.nodes
    df = differentiate(f, 1).values
    return f.replace(params.total_mass * f.values - 1j / params.R * (r * df + 1.5 * f.values))


def nr_momentum_apply(f: GridFunction, params: SystemParams) -> GridFunction:
    """``M_nr`` in momentum space: ``k^2 f / 2 m12 + (i/R)(k f' + 3/2 f)``."""
    k = f.grid.nodes
    df = differentiate(f, 1).values
    return f.replace(k**2 / (2 * params.m12) * f.values
                     + 1j / params.R * (k * df + 1.5 * f.values))


def radial_kinetic_apply(f: GridFunction, m12: float) -> GridFunction:
    """``-(1/2m r^2)(r^2 f')' + l(l+1) f / (2 m r^2)`` for partial wave ``f.l``."""
    r = f.grid.nodes
    d1 = differentiate(f, 1).values
    d2 = differentiate(f, 2).values
    l = f.l
    return f.replace((-(d2 + 2 * d1 / r) + l * (l + 1) / r**2 * f.values) / (2 * m12))


def nr_coordinate_apply(f: GridFunction, params: SystemParams, potential=None) -> GridFunction:
    """Coordinate-space ``M_nr`` (or its interacting version if ``potential`` is given)."""
    r = f.grid.nodes
    out = radial_kinetic_apply(f, params.m12).values
    if potential is not None:
        out = out + potential(r) * f.values
    df = differentiate(f, 1).values
    out = out - 1j / params.R * (r * df + 1.5 * f.values)
    return f.replace(out)
