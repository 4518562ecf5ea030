"""Root finding for monotone scalar functions.

Bracketed bisection with Newton acceleration: bisection guarantees progress
on any continuous monotone function, while Newton steps taken from inside the
bracket give the usual quadratic tail convergence. A Newton candidate is
rejected (and replaced by the midpoint) whenever it leaves the open bracket
or fails to shrink the residual, so the bracket keeps narrowing no matter how
the derivative behaves.
"""

import math

from .errors import NumericalError


def solve_monotone(f, lo, hi, *, fprime=None, ftol, max_iter=200):
    """Return x in [lo, hi] with |f(x)| <= ftol for a continuous monotone f.

    f(lo) and f(hi) must straddle zero (either orientation). When ``fprime``
    is given, Newton steps are attempted first; bisection is the fallback.
    Raises NumericalError if the endpoints do not bracket a sign change or
    the iteration budget runs out before the residual tolerance is met.
    """
    flo = f(lo)
    if abs(flo) <= ftol:
        return lo
    fhi = f(hi)
    if abs(fhi) <= ftol:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NumericalError(f"no sign change on bracket [{lo!r}, {hi!r}]")
    increasing = fhi > 0.0

    # Current iterate: the endpoint with the smaller residual.
    if abs(flo) <= abs(fhi):
        x, fx = lo, flo
    else:
        x, fx = hi, fhi

    force_bisect = False
    for _ in range(max_iter):
        cand = None
        if fprime is not None and not force_bisect:
            d = fprime(x)
            if d != 0.0 and math.isfinite(d):
                step = x - fx / d
                if lo < step < hi:
                    cand = step
        if cand is None:
            cand = 0.5 * (lo + hi)
        fc = f(cand)
        if abs(fc) <= ftol:
            return cand
        # Demand residual progress from Newton; bisect next round otherwise.
        force_bisect = abs(fc) > 0.5 * abs(fx)
        if (fc > 0.0) == increasing:
            hi = cand
        else:
            lo = cand
        x, fx = cand, fc
        if hi <= lo or (hi - lo) <= abs(x) * 1e-17:
            # Bracket exhausted at floating-point resolution.
            return x
    raise NumericalError(
        f"no convergence after {max_iter} iterations; residual {fx!r} at {x!r}"
    )


def expand_bracket_upper(f, start, *, max_doublings=4096):
    """Grow ``hi`` geometrically from ``start`` until f(hi) <= 0.

    Helper for inverting strictly decreasing survival-style curves where
    f(0) > 0 and f -> negative as x grows. Returns the located upper bound.
    """
    hi = start
    for _ in range(max_doublings):
        if f(hi) <= 0.0:
            return hi
        hi *= 2.0
    raise NumericalError(f"no upper bracket found after {max_doublings} doublings")
