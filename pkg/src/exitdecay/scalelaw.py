"""Scale laws for the random amplitude and their special-function layer.

A scale law (d, theta) says the random amplitude decays like
P(A >= r) = exp(-d r^theta) on the exponential scale.  Collapsing the
amplitude out of a joint minimization leaves the scalar profile

    profile(S) = inf_{a >= 0} { d a^theta + S / (2 a^2) }
               = prefactor(d, theta) * (S / 2)^(theta / (theta + 2)),

whose prefactor is computed in closed form by :func:`profile_prefactor` and
independently by the numerical minimization :func:`scalar_profile`.

The module also evaluates the Mittag-Leffler function and the M-Wright
density, which characterize the amplitude family behind grey-Brownian-type
models, and derives the (d, theta) law of powers of that amplitude.  Series
are summed in double precision with compensated (Kahan) accumulation and a
relative-term cutoff; they are meant for desk-scale arguments, not for
asymptotic regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, rgamma

from .errors import NumericalError, ValidationError
from .optimize import bracket_geometric, golden_section

_SERIES_RTOL = 1e-15
_SERIES_MAX_TERMS = 10_000
_CANCELLATION_LIMIT = 1e15
_MLF_ARG_BUDGET = 50.0
_MWRIGHT_ARG_BUDGET = 10.0


@dataclass(frozen=True)
class ScaleLaw:
    """Exponential tail law of the random amplitude: rate d * x^theta."""

    d: float
    theta: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValidationError(f"scale law requires d > 0, got {self.d}")
        if not self.theta > 0.0:
            raise ValidationError(f"scale law requires theta > 0, got {self.theta}")


@dataclass(frozen=True)
class GgbmParams:
    """Parameters of the grey-Brownian amplitude family: A = L^rho with L ~ M-Wright(beta)."""

    beta: float
    rho: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValidationError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.rho > 0.0:
            raise ValidationError(f"rho must be positive, got {self.rho}")


def scale_rate(law: ScaleLaw, x: float) -> float:
    """Rate function of the amplitude: d * x^theta for x >= 0."""
    if x < 0.0:
        raise ValidationError(f"scale rate is defined for x >= 0, got {x}")
    return law.d * x**law.theta


def profile_prefactor(law: ScaleLaw) -> float:
    """Closed-form constant multiplying (S/2)^(theta/(theta+2)) in the profile."""
    d, th = law.d, law.theta
    return 2.0 ** (th / (th + 2.0)) * (
        d * (d * th) ** (-th / (th + 2.0)) + 0.5 * (d * th) ** (2.0 / (th + 2.0))
    )


def scalar_profile(law: ScaleLaw, S: float) -> float:
    """inf over a >= 0 of d a^theta + S / (2 a^2), minimized numerically.

    Serves as the independent check of :func:`profile_prefactor`; for S = 0
    the infimum is 0 (taking a = 0).
    """
    if S < 0.0:
        raise ValidationError(f"squared-norm budget S must be >= 0, got {S}")
    if S == 0.0:
        return 0.0
    d, th = law.d, law.theta

    def objective(a: float) -> float:
        return d * a**th + S / (2.0 * a * a)

    lo, hi = bracket_geometric(objective)
    a_star, val = golden_section(objective, lo, hi, tol=1e-10 * max(lo, 1e-30))
    # the geometric bracket can be loose; tighten once around the refined point
    a_star, val = golden_section(objective, a_star / 2.0, a_star * 2.0, tol=1e-10 * a_star)
    return val


def mittag_leffler(beta: float, z: float) -> float:
    """One-parameter Mittag-Leffler function, sum over h of z^h / Gamma(beta h + 1).

    Valid for beta in (0, 1]; |z| is capped at the desk-scale budget.  Raises
    NumericalError when the series does not settle within the term cap or the
    alternating sum cancels catastrophically.
    """
    if not (0.0 < beta <= 1.0):
        raise ValidationError(f"mittag_leffler requires beta in (0, 1], got {beta}")
    if not np.isfinite(z) or abs(z) > _MLF_ARG_BUDGET:
        raise ValidationError(f"|z| exceeds the series budget {_MLF_ARG_BUDGET}, got {z}")
    total, comp = 1.0, 0.0  # h = 0 term
    term = 1.0
    largest = 1.0
    err_budget = 1e-16
    small_streak = 0
    for h in range(_SERIES_MAX_TERMS):
        term *= z * math.exp(gammaln(beta * h + 1.0) - gammaln(beta * (h + 1) + 1.0))
        if not math.isfinite(term):
            raise NumericalError(f"mittag_leffler series overflowed at term {h + 1}")
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        largest = max(largest, abs(term))
        err_budget += 1e-13 * abs(term)  # the term recurrence accumulates round-off
        if abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
    else:
        raise NumericalError(f"mittag_leffler series did not converge in {_SERIES_MAX_TERMS} terms")
    if largest > _CANCELLATION_LIMIT * max(abs(total), 1e-300) or abs(total) <= 1e3 * err_budget:
        raise NumericalError("mittag_leffler series lost all significant digits to cancellation")
    return total


def _mwright_term(k: int, tau: float, x: float, poly: float) -> tuple[float, float]:
    """k-th series term (-tau)^k / (k! Gamma(x)) plus its relative accuracy.

    `poly` is the running (-tau)^k / k!.  The direct product is used while
    both factors sit comfortably inside the double range; otherwise the term
    is assembled in sign/log form (reflection formula for Gamma at negative
    arguments), which keeps mid-series terms representable even when one
    factor alone would over- or underflow.  The second return value is the
    per-term relative error scale (the log route pays for exponentiating a
    large log-magnitude).
    """
    if x <= 0.0 and x == math.floor(x):
        return 0.0, 1e-14  # reciprocal Gamma vanishes at the poles
    g = float(rgamma(x))
    if math.isfinite(g) and abs(poly) > 1e-250:
        return poly * g, 1e-14
    if tau == 0.0:
        return 0.0, 1e-14
    log_poly = k * math.log(tau) - gammaln(k + 1)
    sign = -1.0 if k % 2 else 1.0
    if x > 0.0:
        log_rg = -gammaln(x)
    else:
        s = math.sin(math.pi * x)
        log_rg = gammaln(1.0 - x) + math.log(abs(s)) - math.log(math.pi)
        sign *= math.copysign(1.0, s)
    log_mag = log_poly + log_rg
    if log_mag < -745.0:
        return 0.0, 1e-14
    if log_mag > 709.0:
        raise NumericalError(f"mwright_density term {k} overflows the double range")
    return sign * math.exp(log_mag), 1e-13


def mwright_density(beta: float, tau: float) -> float:
    """M-Wright density at tau >= 0: sum over k of (-tau)^k / (k! Gamma(1 - beta - beta k)).

    Reciprocal-gamma convention: terms whose Gamma argument hits a pole are 0.
    Raises NumericalError when the alternating sum cancels so strongly that
    no significant digits survive in double precision.
    """
    if not (0.0 < beta < 1.0):
        raise ValidationError(f"mwright_density requires beta in (0, 1), got {beta}")
    if not np.isfinite(tau) or tau < 0.0:
        raise ValidationError(f"tau must be a finite nonnegative real, got {tau}")
    if tau > _MWRIGHT_ARG_BUDGET:
        raise ValidationError(f"tau exceeds the series budget {_MWRIGHT_ARG_BUDGET}, got {tau}")
    total, comp = 0.0, 0.0
    poly = 1.0  # (-tau)^k / k!
    largest = 0.0
    err_budget = 0.0  # accumulated absolute error of the evaluated terms
    small_streak = 0
    for k in range(_SERIES_MAX_TERMS):
        term, err_scale = _mwright_term(k, tau, 1.0 - beta - beta * k, poly)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        largest = max(largest, abs(term))
        err_budget += err_scale * abs(term)
        if abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300) and k > 0:
            small_streak += 1
            if small_streak >= 4:
                break
        else:
            small_streak = 0
        poly *= -tau / (k + 1)
    else:
        raise NumericalError(f"mwright_density series did not converge in {_SERIES_MAX_TERMS} terms")
    if largest > _CANCELLATION_LIMIT * max(abs(total), 1e-300) or abs(total) <= 1e3 * err_budget:
        raise NumericalError("mwright_density series lost all significant digits to cancellation")
    return total


def ggbm_scale_law(params: GgbmParams) -> ScaleLaw:
    """The (d, theta) law of A = L^rho for an M-Wright(beta) amplitude L.

    d depends on beta only; the power rho enters through theta.
    """
    b = params.beta
    d = b ** (b / (1.0 - b)) - b ** (1.0 / (1.0 - b))
    theta = 1.0 / (params.rho * (1.0 - b))
    return ScaleLaw(d=d, theta=theta)


def legendre_conjugate(beta: float, x: float) -> float:
    """Numerical convex conjugate sup_{eta >= 0} { eta x - eta^(1/beta) }.

    Independent check of :func:`ggbm_scale_law` at rho = 1.
    """
    if not (0.0 < beta < 1.0):
        raise ValidationError(f"legendre_conjugate requires beta in (0, 1), got {beta}")
    if x < 0.0:
        raise ValidationError(f"legendre_conjugate is defined for x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    inv_beta = 1.0 / beta

    def negated(eta: float) -> float:
        return eta**inv_beta - eta * x

    lo, hi = bracket_geometric(negated)
    eta_star, val = golden_section(negated, lo, hi, tol=1e-12 * max(lo, 1e-30))
    eta_star, val = golden_section(negated, eta_star / 2.0, eta_star * 2.0, tol=1e-12 * eta_star)
    return -val
