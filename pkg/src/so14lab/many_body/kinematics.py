"""Centre-of-mass and Jacobi variables for two and three particles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import SystemParams


class UnsupportedSystemError(ValueError):
    """Only two- and three-particle systems are handled."""


TREES = {2: ("P", "k"), 3: ("P", "k12", "K12")}


def momentum_matrix(masses) -> np.ndarray:
    """Rows give ``P``, ``k`` (and ``K12``) as combinations of the particle momenta.

    ``k = (m2 p1 - m1 p2)/(m1 + m2)`` and
    ``K12 = (m3 (p1 + p2) - (m1 + m2) p3)/(m1 + m2 + m3)``.
    """
    m = np.asarray(masses, dtype=float)
    if m.size == 2:
        m1, m2 = m
        return np.array([[1.0, 1.0], [m2, -m1]]) / np.array([[1.0], [m1 + m2]])
    if m.size == 3:
        m1, m2, m3 = m
        M = m1 + m2 + m3
        return np.array([[1.0, 1.0, 1.0],
                         [m2 / (m1 + m2), -m1 / (m1 + m2), 0.0],
                         [m3 / M, m3 / M, -(m1 + m2) / M]])
    raise UnsupportedSystemError(f"Jacobi variables need 2 or 3 particles, got {m.size}")


@dataclass(frozen=True)
class KinematicFrame:
    """Total momentum and internal Jacobi momenta, each an array ``(..., 3)``."""

    labels: tuple
    vectors: tuple
    masses: tuple

    def __getitem__(self, label: str) -> np.ndarray:
        return self.vectors[self.labels.index(label)]

    @property
    def P(self) -> np.ndarray:
        return self.vectors[0]

    @property
    def internal(self) -> tuple:
        return self.vectors[1:]


def to_jacobi(momenta, params: SystemParams) -> KinematicFrame:
    """Particle momenta ``(n, ..., 3)`` to ``P`` and the relative momenta."""
    p = np.asarray(momenta, dtype=float)
    masses = params.masses
    if p.shape[0] != masses.size:
        raise ValueError("one momentum per particle is required")
    A = momentum_matrix(masses)
    out = np.tensordot(A, p, axes=(1, 0))
    return KinematicFrame(TREES[masses.size], tuple(out), tuple(masses))


def from_jacobi(frame: KinematicFrame) -> np.ndarray:
    """Inverse of :func:`to_jacobi`."""
    A = momentum_matrix(frame.masses)
    return np.tensordot(np.linalg.inv(A), np.stack(frame.vectors), axes=(1, 0))


def to_center_of_mass(positions, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """``X = (m1 x1 + m2 x2)/(m1 + m2)`` and ``r = x1 - x2`` for two particles."""
    x = np.asarray(positions, dtype=float)
    m = params.masses
    if m.size != 2 or x.shape[0] != 2:
        raise UnsupportedSystemError("centre-of-mass coordinates are defined for two particles")
    return (m[0] * x[0] + m[1] * x[1]) / m.sum(), x[0] - x[1]


def from_center_of_mass(X, r, params: SystemParams) -> np.ndarray:
    m = params.masses
    a1, a2 = m[:2] / m[:2].sum()
    X, r = np.asarray(X, dtype=float), np.asarray(r, dtype=float)
    return np.stack([X + a2 * r, X - a1 * r])
