"""Regularized central potentials."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import exp1

KINDS = ("none", "coulomb", "yukawa", "linear")
DEFAULT_CORE_RADIUS = 1e-3


@dataclass(frozen=True)
class PotentialSpec:
    """``V(r)`` of kind none, coulomb (``-alpha/r``), yukawa (``-alpha e^{-r/range}/r``)
    or linear (``slope * r``), frozen at ``V(r_c)`` inside the core radius ``r_c``.
    """

    kind: str = "none"
    alpha: float = 0.0
    range: float = 1.0
    slope: float = 0.0
    r_c: float = DEFAULT_CORE_RADIUS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if not self.r_c > 0:
            raise ValueError("core radius must be positive")
        if self.kind == "yukawa" and not self.range > 0:
            raise ValueError("yukawa range must be positive")
        for name in ("alpha", "range", "slope"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def none(cls) -> "PotentialSpec":
        return cls("none")

    @classmethod
    def coulomb(cls, alpha: float, r_c: float = DEFAULT_CORE_RADIUS) -> "PotentialSpec":
        return cls("coulomb", alpha=alpha, r_c=r_c)

    @classmethod
    def yukawa(cls, alpha: float, range: float, r_c: float = DEFAULT_CORE_RADIUS) -> "PotentialSpec":
        return cls("yukawa", alpha=alpha, range=range, r_c=r_c)

    @classmethod
    def linear(cls, slope: float, r_c: float = DEFAULT_CORE_RADIUS) -> "PotentialSpec":
        return cls("linear", slope=slope, r_c=r_c)

    @property
    def is_free(self) -> bool:
        return self.kind == "none" or (self.kind in ("coulomb", "yukawa") and self.alpha == 0) \
            or (self.kind == "linear" and self.slope == 0)

    def _bare(self, r):
        if self.kind == "coulomb":
            return -self.alpha / r
        if self.kind == "yukawa":
            return -self.alpha * np.exp(-r / self.range) / r
        if self.kind == "linear":
            return self.slope * r
        return np.zeros_like(r)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self._bare(np.maximum(r, self.r_c))

    def with_core(self, r_c: float) -> "PotentialSpec":
        return PotentialSpec(self.kind, self.alpha, self.range, self.slope, r_c)

    def cosmological_phase(self, r, R: float):
        """``Phi_V(r) = R * int_r^inf V(s)/s ds`` (for linear: ``-R slope r``).

        The large-r wave in the cosmological regime is
        ``r^{-3/2} exp(i lam R ln r + i Phi_V(r))``; the constant in ``Phi_V``
        only shifts the overall phase.  Valid outside the core.
        """
        r = np.asarray(r, dtype=float)
        if self.kind == "coulomb":
            return -R * self.alpha / r
        if self.kind == "yukawa":
            a = self.range
            tail = np.exp(-r / a) / r - exp1(r / a) / a
            return -R * self.alpha * tail
        if self.kind == "linear":
            return -R * self.slope * r
        return np.zeros_like(r)

    def describe(self) -> str:
        if self.kind == "coulomb":
            return f"coulomb(alpha={self.alpha}, r_c={self.r_c})"
        if self.kind == "yukawa":
            return f"yukawa(alpha={self.alpha}, range={self.range}, r_c={self.r_c})"
        if self.kind == "linear":
            return f"linear(slope={self.slope}, r_c={self.r_c})"
        return "none"
