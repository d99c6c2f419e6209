"""Probability-simplex geometry: Euclidean projection and Dirichlet draws."""

from __future__ import annotations

import numpy as np

from .autodiff import NumericsError
from .rng import Rng


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of v onto {w : w >= 0, sum w = 1}.

    Sort-and-threshold algorithm, O(n log n). Exact up to round-off: the
    support is the largest prefix of the descending sort with positive
    shifted entries.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise NumericsError("project_simplex expects a non-empty 1-D vector")
    if not np.isfinite(v).all():
        raise NumericsError("project_simplex expects finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    positive = u + (1.0 - css) / j > 0
    rho = int(np.nonzero(positive)[0][-1])
    tau = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def sample_dirichlet(alpha: float, n: int, rng: Rng) -> np.ndarray:
    """Symmetric Dirichlet(alpha) draw of length n via normalized gammas."""
    if alpha <= 0:
        raise NumericsError("Dirichlet concentration must be positive")
    if n < 1:
        raise NumericsError("need at least one coordinate")
    for _ in range(64):
        g = rng.gamma(alpha, size=n)
        s = g.sum()
        if s > 0 and (g > 0).all():
            return g / s
    raise NumericsError("gamma sampler kept returning degenerate draws")
