"""Independent discretized variational solver for exit decay rates.

Instead of the closed forms, the decay rate is obtained by minimizing the
rate function over full coefficient vectors of kernel atoms living on a time
grid, subject to the exit constraints, and then scanning the candidate exit
times over the grid:

* shared amplitude: the inner problem is an equality-constrained quadratic
  program, solved exactly through its KKT saddle-point linear system (the
  increasing outer power is applied afterwards);
* independent amplitudes: the inner objective is a sum of concave powers of
  the component quadratics; a damped fixed-point iteration on the
  stationarity system (re-solving the saddle system with current curvature
  weights) is run from the single-atom candidate until the projected
  gradient is negligible.

Gram matrices enter through their jittered Cholesky factors, so the same
(slightly regularized) matrix is used consistently in objective and
constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decay import ExitHalfspace, ExitQuadrant
from .errors import NumericalError, ValidationError
from .kernels import KernelSpec, TimeGrid, factor_psd, gram
from .rates import PerturbationModel
from .scalelaw import profile_prefactor

_GRAD_TOL = 1e-10
_RESIDUAL_TOL = 1e-10
_MAX_FIXED_POINT_ITERS = 2000
_DAMPING = 0.5


@dataclass(eq=False)
class DiscretizedProblem:
    """Exit problem discretized on a time grid, with per-component Grams."""

    grid: TimeGrid
    kernels: tuple[KernelSpec, ...]
    exit: ExitHalfspace | ExitQuadrant
    model: PerturbationModel
    grams: tuple[np.ndarray, ...] = field(init=False)

    def __post_init__(self):
        self.kernels = tuple(self.kernels)
        if len(self.grid) < 2:
            raise ValidationError("oracle grids need at least 2 points")
        if self.grid.points[0] <= 0.0:
            raise ValidationError("oracle grids must exclude t = 0")
        p = self.exit.p
        if len(self.kernels) != p:
            raise ValidationError(f"need {p} kernels, got {len(self.kernels)}")
        if self.model.mode == "shared" and len(self.model.laws) != 1:
            raise ValidationError("oracle needs a shared model with its scale law")
        if self.model.mode == "hadamard" and len(self.model.laws) != p:
            raise ValidationError(f"hadamard model needs {p} scale laws")
        if self.grid.T != self.exit.shift.T:
            raise ValidationError("grid horizon differs from the exit horizon")
        regularized = []
        for spec in self.kernels:
            L = factor_psd(gram(spec, self.grid))
            regularized.append(L @ L.T)  # jittered Gram, used consistently below
        self.grams = tuple(regularized)

    @classmethod
    def uniform(cls, m, kernels, exit, model) -> "DiscretizedProblem":
        return cls(TimeGrid.uniform(exit.shift.T, m), tuple(kernels), exit, model)

    @property
    def p(self) -> int:
        return self.exit.p

    @property
    def m(self) -> int:
        return len(self.grid)


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Best grid decay rate, its exit time(s), and the minimizing coefficients."""

    w: float
    t_star: float | np.ndarray
    coefficients: np.ndarray  # shape (p, m)


def _solve_single_constraint_qp(K: np.ndarray, r: int, target: float) -> tuple[np.ndarray, float]:
    """Exact minimizer of (1/2) c^T K c subject to (K c)[r] = target.

    Solved through the full KKT saddle system; returns (c, value).
    """
    m = K.shape[0]
    kkt = np.zeros((m + 1, m + 1))
    kkt[:m, :m] = K
    kkt[:m, m] = K[r]
    kkt[m, :m] = K[r]
    rhs = np.zeros(m + 1)
    rhs[m] = target
    sol = np.linalg.solve(kkt, rhs)
    c = sol[:m]
    residual = abs(float(K[r] @ c) - target)
    if residual > _RESIDUAL_TOL * max(1.0, abs(target)):
        raise NumericalError(f"QP constraint residual {residual:.3e} too large")
    return c, 0.5 * float(c @ K @ c)


def _halfspace_targets(prob: DiscretizedProblem) -> np.ndarray:
    exit = prob.exit
    return exit.x - exit.xi @ exit.shift(prob.grid.points)


def _halfspace_candidate(prob: DiscretizedProblem, r: int, target: float) -> list[np.ndarray]:
    """Single-atom starting point for the fixed-point iteration.

    With a common law this is the closed-form stationary candidate; with
    heterogeneous laws (outside the common-law closed form) the exact
    shared-model QP solution serves as a feasible start instead.
    """
    exit = prob.exit
    laws = prob.model.laws
    if any(law != laws[0] for law in laws):
        _, comps = _halfspace_inner_shared(prob, r, target)
        return comps
    th = laws[0].theta
    q = th / (th - 2.0)
    ktt = np.array([G[r, r] for G in prob.grams])
    denom = float(np.sum(exit.xi ** (2.0 * q) * ktt**q))
    weights = target * exit.xi ** ((th + 2.0) / (th - 2.0)) * ktt ** (2.0 / (th - 2.0)) / denom
    out = []
    for i in range(prob.p):
        c = np.zeros(prob.m)
        c[r] = weights[i]
        out.append(c)
    return out


def _halfspace_inner_shared(prob: DiscretizedProblem, r: int, target: float):
    """Exact inner solve for the shared-amplitude model at grid index r."""
    exit = prob.exit
    p, m = prob.p, prob.m
    n = p * m
    kkt = np.zeros((n + 1, n + 1))
    a = np.zeros(n)
    for i, G in enumerate(prob.grams):
        kkt[i * m : (i + 1) * m, i * m : (i + 1) * m] = G
        a[i * m : (i + 1) * m] = exit.xi[i] * G[r]
    kkt[:n, n] = a
    kkt[n, :n] = a
    rhs = np.zeros(n + 1)
    rhs[n] = target
    sol = np.linalg.solve(kkt, rhs)
    c = sol[:n]
    residual = abs(float(a @ c) - target)
    if residual > _RESIDUAL_TOL * max(1.0, abs(target)):
        raise NumericalError(
            f"halfspace QP residual {residual:.3e} at t = {prob.grid.points[r]:.6g}"
        )
    comps = [c[i * m : (i + 1) * m] for i in range(p)]
    half_norm_sum = 0.5 * sum(float(ci @ G @ ci) for ci, G in zip(comps, prob.grams))
    law = prob.model.laws[0]
    value = profile_prefactor(law) * half_norm_sum ** (law.theta / (law.theta + 2.0))
    return value, comps


def _halfspace_inner_hadamard(prob: DiscretizedProblem, r: int, target: float):
    """Damped fixed-point solve of the stationarity system at grid index r."""
    exit = prob.exit
    laws = prob.model.laws
    active = [i for i in range(prob.p) if exit.xi[i] > 0.0]
    m = prob.m
    comps = _halfspace_candidate(prob, r, target)

    def objective(cs) -> float:
        total = 0.0
        for i in active:
            law = laws[i]
            qi = 0.5 * float(cs[i] @ prob.grams[i] @ cs[i])
            total += profile_prefactor(law) * qi ** (law.theta / (law.theta + 2.0))
        return total

    n_act = len(active) * m
    a = np.zeros(n_act)
    for pos, i in enumerate(active):
        a[pos * m : (pos + 1) * m] = exit.xi[i] * prob.grams[i][r]
    a_norm_sq = float(a @ a)
    for _ in range(_MAX_FIXED_POINT_ITERS):
        grads = []
        weights = []
        for i in active:
            law = laws[i]
            si = law.theta / (law.theta + 2.0)
            qi = 0.5 * float(comps[i] @ prob.grams[i] @ comps[i])
            if qi <= 0.0:
                raise NumericalError(
                    f"component {i} collapsed to zero norm under an active constraint "
                    f"at t = {prob.grid.points[r]:.6g}"
                )
            mu = profile_prefactor(law) * si * qi ** (si - 1.0)
            weights.append(mu)
            grads.append(mu * (prob.grams[i] @ comps[i]))
        g = np.concatenate(grads)
        gamma = float(g @ a) / a_norm_sq
        if float(np.linalg.norm(g - gamma * a)) <= _GRAD_TOL:
            break
        kkt = np.zeros((n_act + 1, n_act + 1))
        for pos, (i, mu) in enumerate(zip(active, weights)):
            kkt[pos * m : (pos + 1) * m, pos * m : (pos + 1) * m] = mu * prob.grams[i]
        kkt[:n_act, n_act] = a
        kkt[n_act, :n_act] = a
        rhs = np.zeros(n_act + 1)
        rhs[n_act] = target
        sol = np.linalg.solve(kkt, rhs)
        for pos, i in enumerate(active):
            step = sol[pos * m : (pos + 1) * m] - comps[i]
            comps[i] = comps[i] + _DAMPING * step
    else:
        raise NumericalError(
            f"fixed-point iteration did not reach gradient tolerance at "
            f"t = {prob.grid.points[r]:.6g}"
        )
    stacked = np.concatenate([comps[i] for i in active])
    residual = abs(float(a @ stacked) - target)
    if residual > 1e-8 * max(1.0, abs(target)):
        raise NumericalError(
            f"fixed-point constraint residual {residual:.3e} at t = {prob.grid.points[r]:.6g}"
        )
    return objective(comps), comps


def oracle_halfspace(prob: DiscretizedProblem) -> OracleResult:
    """Minimum of the discretized rate over grid exit times (halfspace exit)."""
    if not isinstance(prob.exit, ExitHalfspace):
        raise ValidationError("oracle_halfspace needs a halfspace exit")
    if prob.model.mode == "hadamard":
        for law in prob.model.laws:
            if not law.theta > 2.0:
                raise ValidationError("hadamard halfspace oracle requires theta > 2")
    targets = _halfspace_targets(prob)
    best = None
    for r in range(prob.m):
        if prob.model.mode == "shared":
            value, comps = _halfspace_inner_shared(prob, r, float(targets[r]))
        else:
            value, comps = _halfspace_inner_hadamard(prob, r, float(targets[r]))
        if best is None or value < best[0]:
            best = (value, r, comps)
    value, r, comps = best
    coeffs = np.vstack(comps)
    return OracleResult(w=value, t_star=float(prob.grid.points[r]), coefficients=coeffs)


def oracle_quadrant(prob: DiscretizedProblem) -> OracleResult:
    """Minimum of the discretized rate over grid exit times (quadrant exit).

    The search separates per component: under independent amplitudes the
    objective is a sum of per-component terms, and under a shared amplitude
    the increasing outer power reduces the problem to minimizing the sum of
    the component quadratics.
    """
    if not isinstance(prob.exit, ExitQuadrant):
        raise ValidationError("oracle_quadrant needs a quadrant exit")
    exit = prob.exit
    if prob.model.mode == "hadamard":
        for law in prob.model.laws:
            if not law.theta > 2.0:
                raise ValidationError("hadamard quadrant oracle requires theta > 2")
    shifts = exit.shift(prob.grid.points)  # (p, m)
    t_stars = np.empty(prob.p)
    minima = np.empty(prob.p)
    coeffs = np.zeros((prob.p, prob.m))
    for i in range(prob.p):
        best = None
        for r in range(prob.m):
            target = float(exit.levels[i] - shifts[i, r])
            try:
                c, half_norm = _solve_single_constraint_qp(prob.grams[i], r, target)
            except NumericalError as err:
                raise NumericalError(f"{err} (component {i}, t = {prob.grid.points[r]:.6g})")
            if best is None or half_norm < best[0]:
                best = (half_norm, r, c)
        half_norm, r, c = best
        minima[i] = half_norm
        t_stars[i] = prob.grid.points[r]
        coeffs[i] = c
    if prob.model.mode == "shared":
        law = prob.model.laws[0]
        w = profile_prefactor(law) * minima.sum() ** (law.theta / (law.theta + 2.0))
    else:
        w = sum(
            profile_prefactor(law) * m_i ** (law.theta / (law.theta + 2.0))
            for law, m_i in zip(prob.model.laws, minima)
        )
    return OracleResult(w=float(w), t_star=t_stars, coefficients=coeffs)
