"""Stochastic verification layer.

Simulates the randomly scaled Gaussian processes at a ladder of speeds gamma
and estimates exit probabilities by crude Monte Carlo, so the closed-form
decay rates can be checked against the empirical (1/gamma) log p trend.

Conventions:

* the Gaussian part is scaled by gamma^(-1/2) (the canonical family whose
  large-deviation speed is gamma);
* a random amplitude with tail law (d, theta) is scaled by gamma^(-1/theta);
  a fixed amplitude is left alone (useful as a gamma = 1 validation anchor);
* exits are tested by the grid supremum; the induced downward bias on the
  probability is characterized empirically by grid refinement rather than
  corrected analytically.

Scenario batches run off counter-split seed streams, so results are
reproducible bit-for-bit for a fixed configuration and accumulate by plain
counting (order-independent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .decay import ExitHalfspace, ExitQuadrant
from .errors import InsufficientDataError, ValidationError
from .kernels import KernelSpec, TimeGrid, factor_psd, gram
from .rates import PerturbationModel
from .scalelaw import GgbmParams, ScaleLaw, ggbm_scale_law

_WILSON_Z = 1.959963984540054  # 97.5% normal quantile


@dataclass(frozen=True)
class WeibullScale:
    """Amplitude with exact survival exp(-d r^theta)."""

    law: ScaleLaw


@dataclass(frozen=True)
class LbetaScale:
    """Amplitude A = L^rho with L M-Wright(beta) distributed."""

    params: GgbmParams

    @property
    def law(self) -> ScaleLaw:
        return ggbm_scale_law(self.params)


@dataclass(frozen=True)
class FixedScale:
    """Deterministic amplitude; not scaled with gamma."""

    a: float

    def __post_init__(self):
        if not self.a >= 0.0:
            raise ValidationError(f"fixed amplitude must be >= 0, got {self.a}")


ScaleSource = Union[WeibullScale, LbetaScale, FixedScale]


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings: path grid, speed ladder, sample counts, seeding."""

    grid: TimeGrid
    gammas: tuple[float, ...]
    samples: int
    seed: int
    scale: ScaleSource | tuple[ScaleSource, ...]
    batch: int = 8192

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) == 0 or any(g <= 0.0 for g in gammas):
            raise ValidationError("gammas must be a nonempty sequence of positive speeds")
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise ValidationError("gammas must be strictly increasing")
        if self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}")
        if self.batch < 1:
            raise ValidationError(f"batch must be >= 1, got {self.batch}")
        if isinstance(self.scale, (list, tuple)):
            object.__setattr__(self, "scale", tuple(self.scale))


@dataclass(frozen=True)
class EstimateRow:
    """Exit-probability estimate at one speed."""

    gamma: float
    samples: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    log_rate: Optional[float]  # (1/gamma) ln p_hat; None when p_hat = 0


def wilson_interval(hits: int, n: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval; well behaved near 0 and 1."""
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == n else min(1.0, center + half)
    return lo, hi


def sample_scale_weibull(law: ScaleLaw, gamma: float, rng, size=None):
    """Draw gamma^(-1/theta) * A with P(A >= r) = exp(-d r^theta) exactly."""
    if gamma <= 0.0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    e = rng.standard_exponential(size)
    return gamma ** (-1.0 / law.theta) * (e / law.d) ** (1.0 / law.theta)


def _one_sided_stable(beta: float, rng, size=None):
    """Standard one-sided beta-stable draw S with E exp(-u S) = exp(-u^beta).

    Kanter's arc/exponential construction.
    """
    ang = np.pi * np.clip(rng.random(size), 1e-16, 1.0 - 1e-16)
    w = rng.standard_exponential(size)
    return (np.sin(beta * ang) / np.sin(ang) ** (1.0 / beta)) * (
        np.sin((1.0 - beta) * ang) / w
    ) ** ((1.0 - beta) / beta)


def sample_lbeta(params: GgbmParams, rng, size=None):
    """Draw A = L^rho where L has the M-Wright(beta) density.

    Uses L = S^(-beta) for a one-sided beta-stable S; the sampler is
    validated through the moment identities E[L^h] = h! / Gamma(beta h + 1),
    not through the construction itself.
    """
    s = _one_sided_stable(params.beta, rng, size)
    return s ** (-params.beta * params.rho)


def _component_sampler(spec: KernelSpec, grid: TimeGrid):
    """Returns a function (rng, n) -> (n, m) exact Gaussian paths on the grid.

    The Brownian case (alpha = 1) uses independent-increment cumulative sums;
    other exponents go through the Cholesky factor of the Gram matrix.
    """
    pts = grid.points
    if spec.family == "fbm" and spec.alpha == 1.0:
        sqrt_dt = np.sqrt(np.diff(pts, prepend=0.0))

        def draw(rng, n: int) -> np.ndarray:
            z = rng.standard_normal((n, pts.size))
            z *= sqrt_dt
            np.cumsum(z, axis=1, out=z)
            return z

    else:
        L = factor_psd(gram(spec, grid))

        def draw(rng, n: int) -> np.ndarray:
            return rng.standard_normal((n, pts.size)) @ L.T

    return draw


def sample_gaussian_paths(
    kernels: Sequence[KernelSpec], grid: TimeGrid, n_paths: int, rng
) -> np.ndarray:
    """Independent centered Gaussian components on the grid, shape (n, p, m)."""
    kerns = tuple(kernels)
    out = np.empty((n_paths, len(kerns), len(grid)))
    for i, spec in enumerate(kerns):
        out[:, i, :] = _component_sampler(spec, grid)(rng, n_paths)
    return out


def _normalize_sources(config: SimConfig, model: PerturbationModel, p: int):
    sources = config.scale if isinstance(config.scale, tuple) else (config.scale,)
    if model.mode == "shared":
        if len(sources) != 1:
            raise ValidationError("shared-amplitude simulation takes exactly one scale source")
    elif len(sources) != p:
        raise ValidationError(f"hadamard simulation needs {p} scale sources, got {len(sources)}")
    return sources


def _draw_amplitude(source: ScaleSource, gamma: float, rng, n: int) -> np.ndarray:
    if isinstance(source, WeibullScale):
        return sample_scale_weibull(source.law, gamma, rng, n)
    if isinstance(source, LbetaScale):
        theta = source.law.theta
        return gamma ** (-1.0 / theta) * sample_lbeta(source.params, rng, n)
    if isinstance(source, FixedScale):
        return np.full(n, source.a)
    raise ValidationError(f"unknown scale source {type(source).__name__}")


def estimate_exit_prob(
    config: SimConfig,
    exit: ExitHalfspace | ExitQuadrant,
    model: PerturbationModel,
    kernels: Sequence[KernelSpec],
) -> list[EstimateRow]:
    """Estimate the exit probability at every speed in the ladder.

    Per batch, the amplitude draws come first and the Gaussian path draws
    second (component by component), off an independently seeded sub-stream,
    so the estimate is reproducible for a fixed configuration.
    """
    p = exit.p
    kerns = tuple(kernels)
    if len(kerns) != p:
        raise ValidationError(f"need {p} kernels, got {len(kerns)}")
    if config.grid.T != exit.shift.T:
        raise ValidationError("simulation grid horizon differs from the exit horizon")
    sources = _normalize_sources(config, model, p)
    pts = config.grid.points
    shift_values = exit.shift(pts)  # (p, m)
    samplers = [_component_sampler(spec, config.grid) for spec in kerns]
    halfspace = isinstance(exit, ExitHalfspace)

    n_total = config.samples
    n_batches = -(-n_total // config.batch)
    gamma_streams = np.random.SeedSequence(config.seed).spawn(len(config.gammas))
    rows = []
    for gi, gamma in enumerate(config.gammas):
        batch_seeds = gamma_streams[gi].spawn(n_batches)
        xscale = gamma**-0.5
        hits = 0
        for bi in range(n_batches):
            nb = min(config.batch, n_total - bi * config.batch)
            rng = np.random.default_rng(batch_seeds[bi])
            if model.mode == "shared":
                amp = _draw_amplitude(sources[0], gamma, rng, nb)
                amps = [amp] * p
            else:
                amps = [_draw_amplitude(sources[i], gamma, rng, nb) for i in range(p)]
            if halfspace:
                acc = np.broadcast_to(exit.xi @ shift_values, (nb, pts.size)).copy()
                for i in range(p):
                    paths = samplers[i](rng, nb)
                    paths *= (exit.xi[i] * xscale) * amps[i][:, None]
                    acc += paths
                ok = acc.max(axis=1) >= exit.x
            else:
                ok = np.ones(nb, dtype=bool)
                for i in range(p):
                    paths = samplers[i](rng, nb)
                    paths *= xscale * amps[i][:, None]
                    paths += shift_values[i]
                    ok &= paths.max(axis=1) >= exit.levels[i]
            hits += int(ok.sum())
        p_hat = hits / n_total
        lo, hi = wilson_interval(hits, n_total)
        log_rate = math.log(p_hat) / gamma if hits > 0 else None
        rows.append(
            EstimateRow(
                gamma=gamma,
                samples=n_total,
                hits=hits,
                p_hat=p_hat,
                ci_low=lo,
                ci_high=hi,
                log_rate=log_rate,
            )
        )
    return rows


def rows_from_csv(text: str) -> list[EstimateRow]:
    """Reload estimate rows written by the CLI.

    Probabilities, intervals and log rates are reconstructed from the exact
    integer counts, so a reloaded file reproduces the original report
    bit-for-bit regardless of how the display columns were rounded.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("gamma,"):
        raise ValidationError("estimate CSV must start with the gamma,... header row")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != 7:
            raise ValidationError(f"estimate CSV row has {len(cells)} columns, expected 7")
        gamma = float(cells[0])
        n = int(cells[1])
        hits = int(cells[2])
        lo, hi = wilson_interval(hits, n)
        rows.append(
            EstimateRow(
                gamma=gamma,
                samples=n,
                hits=hits,
                p_hat=hits / n,
                ci_low=lo,
                ci_high=hi,
                log_rate=math.log(hits / n) / gamma if hits > 0 else None,
            )
        )
    return rows


@dataclass(frozen=True)
class CurvePoint:
    gamma: float
    minus_log_rate: float
    rel_err: float


@dataclass(frozen=True)
class DecayCurveReport:
    """Empirical decay curve against a reference rate.

    `monotone_trend` records whether the relative error is non-increasing
    along the ladder, i.e. the curve keeps approaching the reference.
    """

    w_ref: float
    points: tuple[CurvePoint, ...]
    monotone_trend: bool


def decay_curve(rows: Sequence[EstimateRow], w_ref: float) -> DecayCurveReport:
    """Reduce estimate rows to (gamma, -log_rate, relative error) plus a trend flag."""
    if not w_ref > 0.0:
        raise ValidationError(f"reference decay rate must be positive, got {w_ref}")
    usable = [r for r in rows if r.log_rate is not None]
    if len(usable) < 2:
        raise InsufficientDataError(
            f"decay curve needs >= 2 rows with a defined log rate, got {len(usable)}"
        )
    points = tuple(
        CurvePoint(
            gamma=r.gamma,
            minus_log_rate=-r.log_rate,
            rel_err=abs(-r.log_rate - w_ref) / w_ref,
        )
        for r in usable
    )
    errs = [pt.rel_err for pt in points]
    trend = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    return DecayCurveReport(w_ref=w_ref, points=points, monotone_trend=trend)
