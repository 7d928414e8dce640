"""A small container for discretized linear operators.

``LinearOperatorSpec`` pairs a human-readable formula with a callable that
applies the operator to a :class:`GridFunction` (or a multi-wave ``State``
for the generator algebra) and, when available, a routine that returns the
operator's matrix on a given grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np


@dataclass(frozen=True)
class LinearOperatorSpec:
    name: str
    formula: str
    representation: str
    apply: Callable[[Any], Any]
    matrix: Callable[[Any], np.ndarray] | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, f):
        return self.apply(f)

    def dense(self, grid=None) -> np.ndarray:
        if self.matrix is None:
            raise NotImplementedError(f"{self.name} has no matrix form")
        return np.asarray(self.matrix(grid))


def relative_residual(a: np.ndarray, b: np.ndarray, weights=None, ref=None) -> float:
    """``||a - b|| / ||ref||`` with optional quadrature weights (``ref`` defaults to ``b``)."""
    ref = b if ref is None else ref
    w = np.ones(np.shape(a)[0]) if weights is None else np.asarray(weights)

    def nrm(x):
        x = np.abs(np.asarray(x)) ** 2
        x = x.reshape(x.shape[0], -1).sum(axis=1)
        return float(np.sqrt(np.sum(w * x)))

    den = nrm(ref)
    return nrm(np.asarray(a) - np.asarray(b)) / den if den > 0 else nrm(np.asarray(a) - np.asarray(b))
