"""One-dimensional minimization helpers.

Golden-section refinement over a bracket, geometric bracketing for problems
whose natural scale is unknown, and the scan-then-refine strategy used for
exit-time searches.  Ties are resolved toward the smaller argument so that
results are deterministic.
"""

from __future__ import annotations

import math

from .errors import NumericalError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f, lo: float, hi: float, tol: float):
    """Minimize a unimodal scalar function on [lo, hi].

    Returns (x, f(x)) with the bracket narrowed to width <= tol.  Boundary
    minima are handled (the bracket simply collapses onto the endpoint).
    """
    if hi < lo:
        lo, hi = hi, lo
    h = hi - lo
    if h <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    n = max(1, int(math.ceil(math.log(tol / h) / math.log(_INVPHI))))
    c = lo + _INVPHI2 * h
    d = lo + _INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        h *= _INVPHI
        if yc <= yd:  # prefer the left half on ties: smaller minimizer wins
            hi, d, yd = d, c, yc
            c = lo + _INVPHI2 * h
            yc = f(c)
        else:
            lo, c, yc = c, d, yd
            d = lo + _INVPHI * h
            yd = f(d)
    if yc <= yd:
        x = c if yc <= f(lo) else lo
    else:
        x = d if yd <= f(hi) else hi
    return x, f(x)


def bracket_geometric(f, lo: float = 2.0**-60, hi: float = 2.0**60, factor: float = 2.0):
    """Bracket the minimum of a unimodal f on (0, inf) by a geometric scan.

    Returns (a, b) such that the minimizer lies in [a, b].  Raises
    NumericalError when the scan shows no interior minimum.
    """
    xs = []
    x = lo
    while x <= hi:
        xs.append(x)
        x *= factor
    ys = [f(x) for x in xs]
    k = min(range(len(ys)), key=lambda i: (ys[i], i))
    if k == 0 or k == len(xs) - 1:
        raise NumericalError("geometric bracketing failed: minimum escaped the scan range")
    return xs[k - 1], xs[k + 1]
