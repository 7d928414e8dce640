"""Polynomials times a Gaussian in several variables.

Functions ``f(y) = p(y) exp(-1/2 sum a_i y_i^2 + sum b_i y_i)`` form a space
closed under multiplication by a coordinate and under differentiation, so
every generator built from ``y`` and ``d/dy`` acts on it exactly.  Inner
products reduce to one-dimensional Gaussian moments, which Gauss-Hermite
quadrature evaluates exactly.  This gives round-off-level checks of
identities between differential operators in six variables without a
six-dimensional grid.

Axes with ``a_i = 0`` are allowed (plane-wave sectors such as ``exp(i P.X)``);
such functions can be evaluated pointwise but have no finite norm.
"""

from __future__ import annotations

import numpy as np


class PolyGaussian:
    """``sum_alpha coef[alpha] y^alpha`` times the envelope ``exp(-a y^2 / 2 + b y)``."""

    __slots__ = ("coef", "a", "b")

    def __init__(self, coef, a, b=None):
        coef = np.asarray(coef, dtype=complex)
        a = np.asarray(a, dtype=float)
        if coef.ndim != a.size:
            raise ValueError("coefficient array rank must equal the number of variables")
        if np.any(a < 0):
            raise ValueError("envelope widths must be nonnegative")
        b = np.zeros(a.size, complex) if b is None else np.asarray(b, dtype=complex)
        if b.shape != a.shape:
            raise ValueError("b must have one entry per variable")
        self.coef, self.a, self.b = coef, a, b

    # -- construction ---------------------------------------------------------

    @classmethod
    def gaussian(cls, a, b=None, amplitude: complex = 1.0) -> "PolyGaussian":
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return cls(np.full((1,) * a.size, amplitude, dtype=complex), a, b)

    @classmethod
    def random(cls, rng: np.random.Generator, a, b=None, degree: int = 1) -> "PolyGaussian":
        """Random complex coefficients of degree ``<= degree`` in every variable."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        shape = (degree + 1,) * a.size
        coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return cls(coef, a, b)

    @property
    def dim(self) -> int:
        return self.a.size

    def same_envelope(self, other: "PolyGaussian") -> bool:
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def _like(self, coef) -> "PolyGaussian":
        return PolyGaussian(coef, self.a, self.b)

    # -- linear structure -----------------------------------------------------

    def _aligned(self, other: "PolyGaussian"):
        if not self.same_envelope(other):
            raise ValueError("functions have different Gaussian envelopes")
        shape = tuple(max(s, t) for s, t in zip(self.coef.shape, other.coef.shape))
        return _pad_to(self.coef, shape), _pad_to(other.coef, shape)

    def __add__(self, other):
        x, y = self._aligned(other)
        return self._like(x + y)

    def __sub__(self, other):
        x, y = self._aligned(other)
        return self._like(x - y)

    def __mul__(self, c):
        return self._like(self.coef * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.coef)

    def zero(self) -> "PolyGaussian":
        return self._like(np.zeros((1,) * self.dim, complex))

    # -- the two primitive operators ------------------------------------------

    def times(self, axis: int) -> "PolyGaussian":
        """Multiply by ``y_axis``."""
        pad = [(0, 0)] * self.dim
        pad[axis] = (1, 0)
        return self._like(np.pad(self.coef, pad))

    def deriv(self, axis: int) -> "PolyGaussian":
        """``d/dy_axis`` including the derivative of the envelope."""
        c = self.coef
        n = c.shape[axis]
        k = np.arange(n).reshape((-1,) + (1,) * (self.dim - 1 - axis))
        poly = np.take(c * k, np.arange(1, n), axis=axis) if n > 1 else np.zeros_like(c)
        out = self._like(poly) if n > 1 else self.zero()
        out = out + self * self.b[axis]
        if self.a[axis] != 0:
            out = out - self.times(axis) * self.a[axis]
        return out

    # -- evaluation and integrals --------------------------------------------

    def __call__(self, points) -> np.ndarray:
        """Values at ``points`` (shape ``(N, dim)``)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise ValueError("points must have one column per variable")
        t = self.coef[None, ...]
        for i in range(self.dim):
            vand = pts[:, i][:, None] ** np.arange(t.shape[1])[None, :]
            t = np.einsum("pj...,pj->p...", t, vand)
        env = np.exp(-0.5 * pts**2 @ self.a + pts @ self.b)
        return t * env

    def _moments(self, axis: int, size: int) -> np.ndarray:
        """``G[p, q] = int y^(p+q) exp(-a y^2 + 2 Re(b) y) dy``, exactly."""
        a = self.a[axis]
        if a <= 0:
            raise ValueError(f"variable {axis} has no Gaussian decay; the norm is infinite")
        beta = self.b[axis].real
        t, w = np.polynomial.hermite.hermgauss(size + 1)
        y = beta / a + t / np.sqrt(a)
        scale = np.exp(beta**2 / a) / np.sqrt(a)
        p = np.arange(2 * size - 1)
        mom = (w[None, :] * y[None, :] ** p[:, None]).sum(axis=1) * scale
        idx = np.arange(size)
        return mom[idx[:, None] + idx[None, :]]

    def inner(self, other: "PolyGaussian") -> complex:
        """``int conj(self) other d^n y`` (antilinear in ``self``)."""
        x, y = self._aligned(other)
        t = y
        for i in range(self.dim):
            t = np.moveaxis(np.tensordot(self._moments(i, t.shape[i]), t, axes=(1, i)), 0, i)
        return complex(np.vdot(x, t))

    def norm2(self) -> float:
        return float(self.inner(self).real)

    def norm(self) -> float:
        return float(np.sqrt(max(self.norm2(), 0.0)))

    def __repr__(self):
        return f"PolyGaussian(dim={self.dim}, shape={self.coef.shape})"


def _pad_to(c, shape):
    return np.pad(c, [(0, s - t) for s, t in zip(shape, c.shape)])


def relative_distance(f: PolyGaussian, g: PolyGaussian, ref: PolyGaussian | None = None) -> float:
    """``||f - g|| / ||ref||`` with ``ref = g`` by default."""
    ref = g if ref is None else ref
    return (f - g).norm() / ref.norm()


def pointwise_distance(f: PolyGaussian, g: PolyGaussian, points, ref: PolyGaussian | None = None) -> float:
    """``max |f - g| / max |ref|`` over sample points (for non-normalizable sectors)."""
    ref = g if ref is None else ref
    return float(np.max(np.abs(f(points) - g(points))) / np.max(np.abs(ref(points))))
