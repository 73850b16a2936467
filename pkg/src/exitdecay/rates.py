"""Rate functions on the dense set of kernel-atom paths.

Paths are represented per component as a finite atomic measure against the
covariance kernel plus a deterministic shift:

    z_i(u) = sum_j c_{ij} k_i(u, t_{ij}) + b_i(u),

so squared RKHS norms reduce to quadratic forms over the atoms.  Two reduced
rate functions are evaluated: the shared-amplitude form (one random scale
multiplying every component) and the independent-amplitude form (one scale
per component, Hadamard coupling).  Infinity is a first-class rate value so
the zero-amplitude branches need no exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .kernels import KernelSpec, eval_kernel
from .scalelaw import ScaleLaw, profile_prefactor
from .shift import Shift

_NEG_QUAD_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class AtomicComponent:
    """Finite atomic measure sum_j c_j * delta(t_j) with t_j > 0.

    Duplicate atom times are merged by summing their weights.
    """

    times: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        c = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if t.shape != c.shape or t.ndim != 1:
            raise ValidationError("atom times and weights must be 1-d sequences of equal length")
        if np.any(t <= 0.0):
            raise ValidationError("atom times must be strictly positive")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(c)):
            raise ValidationError("atoms must be finite")
        uniq, inverse = np.unique(t, return_inverse=True)
        if uniq.size != t.size:
            merged = np.zeros(uniq.size)
            np.add.at(merged, inverse, c)
            t, c = uniq, merged
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "weights", c)

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple[float, float]]) -> "AtomicComponent":
        if len(atoms) == 0:
            return cls.empty()
        t, c = zip(*atoms)
        return cls(np.asarray(t), np.asarray(c))

    @classmethod
    def empty(cls) -> "AtomicComponent":
        return cls(np.empty(0), np.empty(0))

    @property
    def n(self) -> int:
        return self.times.size

    def scaled(self, s: float) -> "AtomicComponent":
        return AtomicComponent(self.times, s * self.weights)


@dataclass(frozen=True, eq=False)
class AtomicPath:
    """p-component path: per-component atoms + kernels, riding on a shift."""

    components: tuple[AtomicComponent, ...]
    kernels: tuple[KernelSpec, ...]
    shift: Shift

    def __post_init__(self):
        comps = tuple(self.components)
        kerns = tuple(self.kernels)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "kernels", kerns)
        p = len(comps)
        if p < 1:
            raise ValidationError("a path needs at least one component")
        if len(kerns) != p or self.shift.p != p:
            raise ValidationError(
                f"component/kernel/shift counts disagree: {p}/{len(kerns)}/{self.shift.p}"
            )
        for comp in comps:
            if comp.n and comp.times[-1] > self.shift.T * (1.0 + 1e-12):
                raise ValidationError("atom times must not exceed the horizon")

    @property
    def p(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class PerturbationModel:
    """How the random amplitude couples to the components.

    mode 'shared': one scalar amplitude multiplies every component;
    mode 'hadamard': independent per-component amplitudes.
    """

    mode: str
    laws: tuple[ScaleLaw, ...]

    def __post_init__(self):
        if self.mode not in ("shared", "hadamard"):
            raise ValidationError(f"unknown perturbation mode {self.mode!r}")
        laws = tuple(self.laws)
        object.__setattr__(self, "laws", laws)
        if self.mode == "shared" and len(laws) > 1:
            raise ValidationError("shared mode carries exactly one scale law")

    @classmethod
    def shared(cls, law: ScaleLaw) -> "PerturbationModel":
        return cls("shared", (law,))

    @classmethod
    def hadamard(cls, laws: Sequence[ScaleLaw]) -> "PerturbationModel":
        laws = tuple(laws)
        if not laws:
            raise ValidationError("hadamard mode needs one scale law per component")
        return cls("hadamard", laws)

    @classmethod
    def coupling_only(cls, mode: str) -> "PerturbationModel":
        """Model carrying only the coupling mode (for samplers that need no law)."""
        return cls(mode, ())


def rkhs_norm_sq(kernel: KernelSpec, comp: AtomicComponent) -> float:
    """Squared RKHS norm of the kernel-atom part: c^T K c over the atom times.

    Tiny negative round-off is clamped to zero; larger negativity signals a
    broken Gram and raises.
    """
    if comp.n == 0:
        return 0.0
    K = eval_kernel(kernel, comp.times[:, None], comp.times[None, :])
    c = comp.weights
    q = float(c @ K @ c)
    if q < 0.0:
        scale = float(np.abs(c) @ np.abs(K) @ np.abs(c))
        if q >= -_NEG_QUAD_RTOL * max(scale, 1e-300):
            return 0.0
        raise NumericalError(f"quadratic form is negative beyond round-off: {q:.3e}")
    return q


def eval_path(path: AtomicPath, u) -> np.ndarray:
    """Evaluate the path at time(s) u: shape (p,) for scalar u, (p, n) for arrays."""
    base = path.shift(u)
    out = np.array(base, dtype=float, copy=True)
    u_arr = np.asarray(u, dtype=float)
    for i, (comp, kern) in enumerate(zip(path.components, path.kernels)):
        if comp.n:
            contrib = eval_kernel(kern, u_arr[..., None], comp.times) @ comp.weights
            out[i] += contrib
    return out


def conditional_rate(comp: AtomicComponent, kernel: KernelSpec, a: float) -> float:
    """Rate of one component given amplitude a: norm^2 / (2 a^2), with the
    zero-amplitude branch (0 if the component is trivial, +inf otherwise)."""
    if a < 0.0:
        raise ValidationError(f"amplitude must be >= 0, got {a}")
    q = rkhs_norm_sq(kernel, comp)
    if a > 0.0:
        return q / (2.0 * a * a)
    return 0.0 if q == 0.0 else float("inf")


def _norms_sq(path: AtomicPath) -> np.ndarray:
    return np.array(
        [rkhs_norm_sq(k, c) for k, c in zip(path.kernels, path.components)]
    )


def rate_equal(path: AtomicPath, law: ScaleLaw) -> float:
    """Shared-amplitude rate: prefactor * (sum of squared norms / 2)^(theta/(theta+2))."""
    s = 0.5 * float(_norms_sq(path).sum())
    return profile_prefactor(law) * s ** (law.theta / (law.theta + 2.0))


def rate_indep(path: AtomicPath, laws: Sequence[ScaleLaw]) -> float:
    """Independent-amplitude rate: per-component profile terms, summed."""
    laws = tuple(laws)
    if len(laws) != path.p:
        raise ValidationError(f"need {path.p} scale laws, got {len(laws)}")
    total = 0.0
    for q, law in zip(_norms_sq(path), laws):
        total += profile_prefactor(law) * (0.5 * q) ** (law.theta / (law.theta + 2.0))
    return total
