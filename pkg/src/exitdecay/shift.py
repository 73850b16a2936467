"""Deterministic shift paths.

A shift is a continuous R^p-valued function on [0, T] that the randomly
scaled Gaussian part rides on.  It is stored as samples on a grid and
evaluated by linear interpolation, which is exact for the constant and
affine constructors and makes extrema attainable at sample times (handy for
validating exit-level margins exactly).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


class Shift:
    """Piecewise-linear vector path b(t) on [0, T]."""

    __slots__ = ("times", "values", "T")

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if times.ndim != 1 or times.size < 2:
            raise ValidationError("shift needs at least two sample times")
        if np.any(np.diff(times) <= 0.0):
            raise ValidationError("shift sample times must be strictly increasing")
        if times[0] != 0.0:
            raise ValidationError("shift samples must start at t = 0")
        if values.shape[1] != times.size:
            raise ValidationError(
                f"shift values have {values.shape[1]} columns for {times.size} sample times"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("shift values must be finite")
        self.times = times
        self.values = values
        self.T = float(times[-1])

    @classmethod
    def constant(cls, values, T: float) -> "Shift":
        v = np.atleast_1d(np.asarray(values, dtype=float))
        return cls([0.0, T], np.column_stack([v, v]))

    @classmethod
    def zero(cls, p: int, T: float) -> "Shift":
        return cls.constant(np.zeros(p), T)

    @classmethod
    def affine(cls, intercept, slope, T: float) -> "Shift":
        """b_i(t) = intercept_i + slope_i * t."""
        a = np.atleast_1d(np.asarray(intercept, dtype=float))
        b = np.atleast_1d(np.asarray(slope, dtype=float))
        if a.shape != b.shape:
            raise ValidationError("shift intercept and slope must have the same length")
        return cls([0.0, T], np.column_stack([a, a + b * T]))

    @classmethod
    def from_table(cls, times, values) -> "Shift":
        return cls(times, values)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    def __call__(self, u):
        """Evaluate b(u); returns shape (p,) for scalar u, (p, n) for arrays."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < -1e-12) or np.any(u_arr > self.T * (1.0 + 1e-12)):
            raise ValidationError(f"shift evaluated outside [0, {self.T}]")
        return np.stack([np.interp(u_arr, self.times, row) for row in self.values])
