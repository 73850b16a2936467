"""Covariance kernels of the driving Gaussian components.

The built-in family is fractional Brownian motion with exponent ``alpha``
(Hurst parameter ``alpha / 2``),

    k(t, s) = (t^alpha + s^alpha - |t - s|^alpha) / 2,

which reduces to the Brownian kernel ``min(t, s)`` at ``alpha = 1``.  The
module also builds Gram matrices on time grids and factors them for
simulation; Gram matrices of fine fBm grids are near-singular, hence the
escalating diagonal jitter in :func:`factor_psd`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError


@dataclass(frozen=True)
class KernelSpec:
    """A stationary-increment Gaussian covariance kernel for one component."""

    alpha: float
    family: str = "fbm"

    def __post_init__(self):
        if self.family != "fbm":
            raise ValidationError(f"unknown kernel family {self.family!r}; only 'fbm' is built in")
        if not (0.0 < self.alpha < 2.0):
            raise ValidationError(f"kernel exponent alpha must lie in (0, 2), got {self.alpha}")


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times in [0, T].

    Optimization grids exclude t = 0 (the diagonal kernel value vanishes
    there, which makes decay-rate integrands singular); grids for sampling
    or path output may include it.
    """

    T: float
    points: np.ndarray

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValidationError(f"horizon T must be positive, got {self.T}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValidationError("grid points must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("grid points must be finite")
        if np.any(np.diff(pts) <= 0.0):
            raise ValidationError("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > self.T:
            raise ValidationError(f"grid points must lie in [0, {self.T}]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, T: float, m: int) -> "TimeGrid":
        """m equally spaced points T/m, 2T/m, ..., T (zero excluded)."""
        if m < 1:
            raise ValidationError(f"grid size must be >= 1, got {m}")
        return cls(T, np.linspace(T / m, T, m))

    def __len__(self) -> int:
        return self.points.size


def eval_kernel(spec: KernelSpec, t, s):
    """Evaluate the kernel at times ``t``, ``s`` (scalars or broadcastable arrays)."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0.0) or np.any(s < 0.0):
        raise ValidationError("kernel arguments must be nonnegative times")
    a = spec.alpha
    out = 0.5 * (t**a + s**a - np.abs(t - s) ** a)
    return float(out) if out.ndim == 0 else out


def gram(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    """Gram matrix G[j, l] = k(t_j, t_l) on the grid; symmetric and PSD."""
    pts = grid.points
    return eval_kernel(spec, pts[:, None], pts[None, :])


@dataclass(frozen=True)
class JitterPolicy:
    """Diagonal-loading ladder for nearly singular PSD matrices.

    Adds eps * mean(diag) to the diagonal, escalating eps geometrically
    until the Cholesky factorization succeeds.
    """

    initial: float = 1e-12
    factor: float = 10.0
    maximum: float = 1e-6

    def ladder(self):
        yield 0.0
        eps = self.initial
        while eps <= self.maximum * (1.0 + 1e-15):
            yield eps
            eps *= self.factor


DEFAULT_JITTER = JitterPolicy()


def factor_psd(G: np.ndarray, policy: JitterPolicy = DEFAULT_JITTER) -> np.ndarray:
    """Lower-triangular L with L @ L.T ~= G, jittering the diagonal as needed.

    Raises NumericalError if the factorization still fails at the largest
    configured jitter.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {G.shape}")
    if not np.allclose(G, G.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(G).max()))):
        raise ValidationError("matrix is not symmetric")
    scale = float(np.mean(np.diag(G)))
    if scale <= 0.0:
        scale = 1.0
    eps = 0.0
    for eps in policy.ladder():
        try:
            return np.linalg.cholesky(G + (eps * scale) * np.eye(G.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"Cholesky factorization failed even with diagonal jitter {eps * scale:.3e}"
    )
