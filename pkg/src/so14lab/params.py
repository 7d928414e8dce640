"""Physical parameters shared by all modules.

Units: lengths and inverse masses share one unit, and by default the total
mass of a two-particle system is 1.  A de Sitter mass ``mu`` is
dimensionless; the conventional mass is ``m = mu / R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_R = 1.0e3


@dataclass(frozen=True)
class ParticleParams:
    """One spinless particle of de Sitter mass ``mu`` on a space of radius ``R``.

    ``second_hyperboloid`` selects the ``mu -> -mu`` copy of the
    representation.  ``R0`` and ``Lambda = 3 / R0**2`` are carried as
    metadata only.
    """

    mu: float
    R: float = DEFAULT_R
    spin: int = 0
    second_hyperboloid: bool = False
    R0: float | None = None

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not np.isfinite(self.mu):
            raise ValueError("mu must be a finite real number")
        if self.spin != 0:
            raise ValueError("only spinless particles are supported")

    @property
    def m(self) -> float:
        return self.mu / self.R

    @property
    def signed_mu(self) -> float:
        return -self.mu if self.second_hyperboloid else self.mu

    @property
    def cosmological_constant(self) -> float | None:
        return None if self.R0 is None else 3.0 / self.R0**2

    @classmethod
    def from_mass(cls, m: float, R: float = DEFAULT_R, **kw) -> "ParticleParams":
        return cls(mu=m * R, R=R, **kw)


@dataclass(frozen=True)
class SystemParams:
    """Several particles on a common de Sitter space."""

    particles: tuple[ParticleParams, ...] = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(self.particles)
        object.__setattr__(self, "particles", parts)
        if not parts:
            raise ValueError("need at least one particle")
        if len({p.R for p in parts}) != 1:
            raise ValueError("all particles must share the same R")
        if any(p.m <= 0 for p in parts):
            raise ValueError("masses must be positive")

    @classmethod
    def two_body(cls, m1: float = 0.5, m2: float = 0.5, R: float = DEFAULT_R) -> "SystemParams":
        return cls((ParticleParams.from_mass(m1, R), ParticleParams.from_mass(m2, R)))

    @classmethod
    def from_masses(cls, masses, R: float = DEFAULT_R) -> "SystemParams":
        return cls(tuple(ParticleParams.from_mass(m, R) for m in masses))

    @property
    def R(self) -> float:
        return self.particles[0].R

    @property
    def masses(self) -> np.ndarray:
        return np.array([p.m for p in self.particles])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def m12(self) -> float:
        m1, m2 = self.masses[:2]
        return float(m1 * m2 / (m1 + m2))

    @property
    def gamma_sq(self) -> complex:
        """``gamma^2 = -i R / (4 m12)``."""
        return -1j * self.R / (4 * self.m12)

    @property
    def gamma(self) -> complex:
        """Principal square root of ``gamma^2`` (argument ``-pi/4``)."""
        return complex(np.sqrt(self.gamma_sq))

    def with_R(self, R: float) -> "SystemParams":
        return SystemParams.from_masses(self.masses, R)
