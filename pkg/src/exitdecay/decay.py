"""Closed-form exponential decay rates for halfspace and quadrant exits.

Each operation minimizes an explicit one-dimensional objective over the exit
time t in (0, T]; the minimizing time(s) and single-atom weights of the most
likely exit path come for free from the stationarity solution.  Quadrant
problems separate per component (the outer power is increasing, so each
component's exit time is optimized on its own), turning a p-dimensional
search into p scalar ones.

Amplitude coupling mirrors :mod:`exitdecay.rates`: the shared-amplitude
('equal') operations accept any theta > 0, while the independent-amplitude
('indep') ones require theta > 2, where their exponent theta/(theta-2) is
regular and the underlying rate is strictly convex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .kernels import KernelSpec, TimeGrid
from .optimize import golden_section
from .rates import AtomicComponent, AtomicPath
from .scalelaw import ScaleLaw, profile_prefactor
from .shift import Shift


@dataclass(frozen=True)
class OptimizerConfig:
    """Exit-time search settings: coarse scan + golden-section refinement."""

    scan_points: int = 512
    time_tol: float = 1e-10  # relative to the horizon T

    def __post_init__(self):
        if self.scan_points < 2:
            raise ValidationError(f"scan_points must be >= 2, got {self.scan_points}")
        if not (0.0 < self.time_tol < 1.0):
            raise ValidationError(f"time_tol must lie in (0, 1), got {self.time_tol}")


DEFAULT_OPTIMIZER = OptimizerConfig()


@dataclass(frozen=True, eq=False)
class ExitHalfspace:
    """Exit event: sup over t of <Z(t), xi> reaches level x.

    Requires xi >= 0 with at least one positive entry and a strictly positive
    margin x - <b(t), xi> on the whole horizon (checked exactly at the shift's
    sample times, where the piecewise-linear extremum is attained).
    """

    xi: np.ndarray
    x: float
    shift: Shift

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        object.__setattr__(self, "xi", xi)
        if xi.ndim != 1 or xi.size != self.shift.p:
            raise ValidationError(f"xi must have one weight per component ({self.shift.p})")
        if np.any(xi < 0.0) or not np.any(xi > 0.0):
            raise ValidationError("xi must be nonnegative with at least one positive entry")
        if not self.x > 0.0:
            raise ValidationError(f"exit level x must be positive, got {self.x}")
        margins = self.x - xi @ self.shift.values
        if np.any(margins <= 0.0):
            k = int(np.argmin(margins))
            raise ValidationError(
                f"exit level is not above the shift: x - <b(t), xi> = {margins[k]:.6g} "
                f"at t = {self.shift.times[k]:.6g}"
            )

    @property
    def p(self) -> int:
        return self.xi.size


@dataclass(frozen=True, eq=False)
class ExitQuadrant:
    """Exit event: every component's supremum reaches its own level x_i."""

    levels: np.ndarray
    shift: Shift

    def __post_init__(self):
        levels = np.atleast_1d(np.asarray(self.levels, dtype=float))
        object.__setattr__(self, "levels", levels)
        if levels.ndim != 1 or levels.size != self.shift.p:
            raise ValidationError(f"need one level per component ({self.shift.p})")
        if np.any(levels <= 0.0):
            raise ValidationError("all exit levels must be positive")
        margins = levels[:, None] - self.shift.values
        if np.any(margins <= 0.0):
            i, k = np.unravel_index(int(np.argmin(margins)), margins.shape)
            raise ValidationError(
                f"level {i} is not above the shift: x_{i} - b_{i}(t) = {margins[i, k]:.6g} "
                f"at t = {self.shift.times[k]:.6g}"
            )

    @property
    def p(self) -> int:
        return self.levels.size


@dataclass(frozen=True, eq=False)
class DecayResult:
    """Decay rate w, minimizing exit time(s), and single-atom weights."""

    w: float
    t_star: float | np.ndarray  # one time (halfspace) or p times (quadrant)
    c_star: np.ndarray
    geometry: str  # 'halfspace' | 'quadrant'
    coupling: str  # 'shared' | 'hadamard'


def _check_kernels(kernels: Sequence[KernelSpec], p: int) -> tuple[KernelSpec, ...]:
    kerns = tuple(kernels)
    if len(kerns) != p:
        raise ValidationError(f"need {p} kernels, got {len(kerns)}")
    return kerns


def _minimize_exit_time(objective, T: float, opt: OptimizerConfig) -> tuple[float, float]:
    """Scan (0, T] on a uniform grid, then refine by golden section.

    `objective` must accept a float array and return the objective values.
    Ties go to the smallest time.
    """
    ts = np.linspace(T / opt.scan_points, T, opt.scan_points)
    vals = objective(ts)
    k = int(np.argmin(vals))  # first minimum: smallest-t tie-break
    lo = ts[k - 1] if k > 0 else T * 1e-12
    hi = ts[k + 1] if k + 1 < ts.size else T

    def scalar(t: float) -> float:
        return float(objective(np.asarray([t]))[0])

    t_star, w = golden_section(scalar, lo, hi, tol=opt.time_tol * T)
    if vals[k] < w:  # golden cannot beat the scan point it bracketed
        return float(ts[k]), float(vals[k])
    return float(t_star), float(w)


def decay_halfspace_equal(
    exit: ExitHalfspace,
    kernels: Sequence[KernelSpec],
    law: ScaleLaw,
    opt: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> DecayResult:
    """Decay rate of the halfspace exit under a shared amplitude."""
    kerns = _check_kernels(kernels, exit.p)
    v = profile_prefactor(law)
    power = law.theta / (law.theta + 2.0)
    xi = exit.xi
    alphas = np.array([k.alpha for k in kerns])

    def objective(ts: np.ndarray) -> np.ndarray:
        margin = exit.x - xi @ exit.shift(ts)
        denom = (xi**2)[:, None] * ts[None, :] ** alphas[:, None]
        return v * (0.5 * margin**2 / denom.sum(axis=0)) ** power

    t_star, w = _minimize_exit_time(objective, exit.shift.T, opt)
    margin = exit.x - float(xi @ exit.shift(t_star))
    denom = float(np.sum(xi**2 * t_star**alphas))
    c_star = xi * margin / denom
    return DecayResult(w=w, t_star=t_star, c_star=c_star, geometry="halfspace", coupling="shared")


def decay_halfspace_indep(
    exit: ExitHalfspace,
    kernels: Sequence[KernelSpec],
    law: ScaleLaw,
    opt: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> DecayResult:
    """Decay rate of the halfspace exit under independent per-component
    amplitudes with a common law; requires theta > 2."""
    if not law.theta > 2.0:
        raise ValidationError(
            f"independent-amplitude halfspace rates require theta > 2, got {law.theta}"
        )
    kerns = _check_kernels(kernels, exit.p)
    v = profile_prefactor(law)
    th = law.theta
    power = th / (th + 2.0)
    q = th / (th - 2.0)  # dual exponent of the weighted denominator
    xi = exit.xi
    alphas = np.array([k.alpha for k in kerns])

    def objective(ts: np.ndarray) -> np.ndarray:
        margin = exit.x - xi @ exit.shift(ts)
        terms = (xi ** (2.0 * q))[:, None] * ts[None, :] ** (alphas[:, None] * q)
        denom = terms.sum(axis=0) ** (1.0 / q)
        return v * (0.5 * margin**2 / denom) ** power

    t_star, w = _minimize_exit_time(objective, exit.shift.T, opt)
    margin = exit.x - float(xi @ exit.shift(t_star))
    ktt = t_star**alphas
    denom = float(np.sum(xi ** (2.0 * q) * ktt**q))
    c_star = margin * xi ** ((th + 2.0) / (th - 2.0)) * ktt ** (2.0 / (th - 2.0)) / denom
    return DecayResult(
        w=w, t_star=t_star, c_star=c_star, geometry="halfspace", coupling="hadamard"
    )


def _quadrant_component_minima(
    exit: ExitQuadrant, kerns: tuple[KernelSpec, ...], opt: OptimizerConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Per component, minimize (x_i - b_i(t))^2 / k_i(t, t) over t in (0, T]."""
    t_stars = np.empty(exit.p)
    minima = np.empty(exit.p)
    for i, kern in enumerate(kerns):
        level = exit.levels[i]
        alpha = kern.alpha

        def objective(ts: np.ndarray, i=i, level=level, alpha=alpha) -> np.ndarray:
            margin = level - exit.shift(ts)[i]
            return margin**2 / ts**alpha

        t_stars[i], minima[i] = _minimize_exit_time(objective, exit.shift.T, opt)
    return t_stars, minima


def _quadrant_weights(exit: ExitQuadrant, kerns, t_stars: np.ndarray) -> np.ndarray:
    shifts = np.array([exit.shift(t)[i] for i, t in enumerate(t_stars)])
    ktt = np.array([t ** k.alpha for t, k in zip(t_stars, kerns)])
    return (exit.levels - shifts) / ktt


def decay_quadrant_equal(
    exit: ExitQuadrant,
    kernels: Sequence[KernelSpec],
    law: ScaleLaw,
    opt: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> DecayResult:
    """Decay rate of the quadrant exit under a shared amplitude."""
    kerns = _check_kernels(kernels, exit.p)
    t_stars, minima = _quadrant_component_minima(exit, kerns, opt)
    w = profile_prefactor(law) * (0.5 * minima.sum()) ** (law.theta / (law.theta + 2.0))
    c_star = _quadrant_weights(exit, kerns, t_stars)
    return DecayResult(w=w, t_star=t_stars, c_star=c_star, geometry="quadrant", coupling="shared")


def decay_quadrant_indep(
    exit: ExitQuadrant,
    kernels: Sequence[KernelSpec],
    laws: Sequence[ScaleLaw],
    opt: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> DecayResult:
    """Decay rate of the quadrant exit under independent per-component
    amplitudes (possibly different laws); requires every theta_i > 2."""
    kerns = _check_kernels(kernels, exit.p)
    laws = tuple(laws)
    if len(laws) != exit.p:
        raise ValidationError(f"need {exit.p} scale laws, got {len(laws)}")
    for law in laws:
        if not law.theta > 2.0:
            raise ValidationError(
                f"independent-amplitude quadrant rates require theta > 2, got {law.theta}"
            )
    t_stars, minima = _quadrant_component_minima(exit, kerns, opt)
    w = sum(
        profile_prefactor(law) * (0.5 * m) ** (law.theta / (law.theta + 2.0))
        for law, m in zip(laws, minima)
    )
    c_star = _quadrant_weights(exit, kerns, t_stars)
    return DecayResult(
        w=float(w), t_star=t_stars, c_star=c_star, geometry="quadrant", coupling="hadamard"
    )


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A most-likely exit path plus its values sampled on a grid."""

    path: AtomicPath
    times: np.ndarray
    values: np.ndarray  # shape (p, len(times))


def most_likely_path(
    result: DecayResult,
    exit: ExitHalfspace | ExitQuadrant,
    kernels: Sequence[KernelSpec],
    grid: TimeGrid,
) -> SampledPath:
    """Reconstruct the single-atom most likely path of a decay result.

    Component i carries the atom (t*, c*_i) (halfspace: common t*; quadrant:
    its own t*_i); the exit constraint holds exactly at the optimal time(s).
    """
    from .rates import eval_path  # local import to keep module deps one-way

    if isinstance(exit, ExitHalfspace):
        expected = "halfspace"
    elif isinstance(exit, ExitQuadrant):
        expected = "quadrant"
    else:
        raise ValidationError(f"unsupported exit specification {type(exit).__name__}")
    if result.geometry != expected:
        raise ValidationError(
            f"decay result geometry {result.geometry!r} does not match the exit event"
        )
    kerns = _check_kernels(kernels, exit.p)
    if result.geometry == "halfspace":
        atom_times = np.full(exit.p, float(result.t_star))
    else:
        atom_times = np.asarray(result.t_star, dtype=float)
        if atom_times.shape != (exit.p,):
            raise ValidationError("quadrant result must carry one exit time per component")
    comps = tuple(
        AtomicComponent(np.array([t]), np.array([c]))
        for t, c in zip(atom_times, result.c_star)
    )
    path = AtomicPath(components=comps, kernels=kerns, shift=exit.shift)
    values = eval_path(path, grid.points)
    return SampledPath(path=path, times=grid.points.copy(), values=values)
