"""Scalar fields on model domains: competitors, exhaustions, test functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class ScalarField:
    """An extended-real valued function with pole metadata.

    ``func`` maps an array of points of shape ``(N, n)`` to values of
    shape ``(N,)``. ``psh`` records whether the function is
    plurisubharmonic *by construction* (log-moduli of holomorphic maps,
    maxima and positive combinations of such); it is never inferred from
    samples. ``levi`` optionally returns the complex Hessian
    ``d^2 u / dz_j d conj(z_k)`` with shape ``(N, n, n)``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    pole: Optional[tuple] = None
    psh: bool = True
    negative: bool = True
    levi: Optional[Callable[[np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=complex))
        return np.asarray(self.func(P), dtype=float)

    def at(self, p) -> float:
        return float(self(np.asarray(p, dtype=complex).reshape(1, -1))[0])

    def complex_hessian(self, points, step: float = 1e-4) -> np.ndarray:
        """Complex Hessian, analytic when available, else central differences."""
        P = np.atleast_2d(np.asarray(points, dtype=complex))
        if self.levi is not None:
            return np.asarray(self.levi(P), dtype=complex)
        n = P.shape[1]
        H = np.zeros((P.shape[0], n, n), dtype=complex)
        # d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2
        dirs = []
        for j in range(n):
            e = np.zeros(n, dtype=complex)
            e[j] = 1.0
            dirs.append((e, 1j * e))
        f = self.func
        for j in range(n):
            for k in range(n):
                total = 0.0
                for a, ca in ((0, 1.0), (1, -1j)):
                    for b, cb in ((0, 1.0), (1, 1j)):
                        u = dirs[j][a] * step
                        v = dirs[k][b] * step
                        d2 = (f(P + u + v) - f(P + u - v) - f(P - u + v) + f(P - u - v)) / (4 * step * step)
                        total = total + ca * cb * d2
                H[:, j, k] = total / 4.0
        return H


def max_field(name: str, parts: list[ScalarField], pole=None) -> ScalarField:
    """Pointwise maximum; PSH if every part is."""

    def func(P):
        return np.max(np.stack([p.func(P) for p in parts]), axis=0)

    return ScalarField(
        name=name,
        func=func,
        pole=pole,
        psh=all(p.psh for p in parts),
        negative=all(p.negative for p in parts),
    )


def safe_log(x) -> np.ndarray:
    """Natural log mapping 0 to -inf without warnings."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    pos = x > 0
    out[pos] = np.log(x[pos])
    return out
