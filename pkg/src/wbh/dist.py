"""Survival functions for the chi-square and F families.

These are the tail kernels the weighted step-up procedures are built from:
central chi-square (two-sided z tests on squared statistics), noncentral
chi-square with the Poisson-mixture representation (the conditional law of a
weighted squared coordinate given the rest), and the central F distribution
(two-sided t tests via squared t statistics). Inverse survival functions are
computed by a bracketed bisection/Newton hybrid so that sf(isf(u)) round-trips
to 1e-12 relative accuracy.

The lemma*_ratio helpers expose the tail-ratio diagnostics whose monotonicity
underpins the procedures' error control; property tests sweep them over grids.
"""

import math

import numpy as np
from scipy import special

from .errors import InvalidParameterError
from .roots import expand_bracket_upper, solve_monotone

# Inverse-function inputs below this are rejected rather than extrapolated.
TINY_TAIL = 1e-300
# Poisson mixture is truncated once the mass left out drops below this.
_MIXTURE_MASS_TOL = 1e-14
# Relative residual target for inverse survival functions.
_ISF_RTOL = 1e-13


def _check_dof(value, name):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be a positive finite real, got {value!r}")


def _check_tail_prob(u):
    if not (isinstance(u, (int, float)) and 0.0 < u < 1.0):
        raise InvalidParameterError(f"tail probability must lie in (0, 1), got {u!r}")
    if u < TINY_TAIL:
        raise InvalidParameterError(f"tail probability {u!r} is below the supported range")


def _as_nonneg(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise InvalidParameterError(f"{name} must be nonnegative, got {x!r}")
    return arr


def _scalar_or_array(arr, scalar_input):
    return float(arr) if scalar_input else arr


def chi2_sf(x, n):
    """Upper tail probability of the central chi-square with ``n`` dof.

    Accepts a scalar or array ``x >= 0``; ``n`` may be any positive real.
    """
    _check_dof(n, "n")
    arr = _as_nonneg(x, "x")
    out = special.gammaincc(n / 2.0, arr / 2.0)
    return _scalar_or_array(out, arr.ndim == 0)


def _chi2_pdf(x, n):
    if x <= 0.0:
        return 0.0 if n >= 2 else math.inf
    log_pdf = (
        (0.5 * n - 1.0) * math.log(x)
        - 0.5 * x
        - math.lgamma(0.5 * n)
        - 0.5 * n * math.log(2.0)
    )
    return math.exp(log_pdf) if log_pdf > -745.0 else 0.0


def chi2_isf(u, n):
    """Inverse of :func:`chi2_sf` in its first argument."""
    _check_dof(n, "n")
    _check_tail_prob(u)

    def resid(x):
        return float(special.gammaincc(n / 2.0, x / 2.0)) - u

    # resid is strictly decreasing with resid(0) = 1 - u > 0.
    hi = expand_bracket_upper(resid, max(2.0 * n, -2.0 * math.log(u), 1.0))
    root = solve_monotone(
        resid, 0.0, hi, fprime=lambda x: -_chi2_pdf(x, n), ftol=_ISF_RTOL * u
    )
    return max(root, 0.0)


def nc_chi2_sf(x, n, lam):
    """Upper tail of the noncentral chi-square via its Poisson mixture.

    The tail probability equals the Poisson(lam/2) mixture of central
    chi-square tails with n + 2j dof. Terms are accumulated outward from the
    modal Poisson index until the mass left out falls below 1e-14, which
    bounds the truncation error by 1e-14 absolute and avoids underflow of the
    leading terms for large noncentrality. ``lam = 0`` reduces exactly to the
    central tail.
    """
    _check_dof(n, "n")
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam >= 0):
        raise InvalidParameterError(f"noncentrality must be finite and >= 0, got {lam!r}")
    arr = _as_nonneg(x, "x")
    scalar_input = arr.ndim == 0
    if lam == 0.0:
        return _scalar_or_array(special.gammaincc(n / 2.0, arr / 2.0), scalar_input)

    rate = 0.5 * lam
    j_mode = int(rate)
    log_w = j_mode * math.log(rate) - rate - math.lgamma(j_mode + 1.0)
    w_mode = math.exp(log_w)

    half_x = arr / 2.0
    acc = w_mode * special.gammaincc(n / 2.0 + j_mode, half_x)
    mass = w_mode

    w_up, j_up = w_mode, j_mode
    w_dn, j_dn = w_mode, j_mode
    while mass < 1.0 - _MIXTURE_MASS_TOL:
        j_up += 1
        w_up *= rate / j_up
        acc += w_up * special.gammaincc(n / 2.0 + j_up, half_x)
        mass += w_up
        if j_dn > 0:
            w_dn *= j_dn / rate
            j_dn -= 1
            acc += w_dn * special.gammaincc(n / 2.0 + j_dn, half_x)
            mass += w_dn
    out = np.minimum(acc, 1.0)
    return _scalar_or_array(out, scalar_input)


def _nc_chi2_sf_lams(x, n, lams):
    """Vectorized noncentral tail for one threshold and many noncentralities.

    Shares the Poisson-mixture truncation bound: the term count is chosen so
    the largest rate in ``lams`` leaves out less than 1e-14 of its mass, and
    Poisson tail mass beyond a fixed index only grows with the rate.
    """
    rates = np.asarray(lams, dtype=float) / 2.0
    if np.any(rates < 0):
        raise InvalidParameterError("noncentralities must be >= 0")
    r_max = float(rates.max(initial=0.0))
    if r_max == 0.0:
        return np.full(rates.shape, float(special.gammaincc(n / 2.0, x / 2.0)))

    n_terms = 1
    w = math.exp(-r_max)
    mass = w
    while mass < 1.0 - _MIXTURE_MASS_TOL:
        w *= r_max / n_terms
        mass += w
        n_terms += 1

    term = np.exp(-rates)
    acc = term * float(special.gammaincc(n / 2.0, x / 2.0))
    for j in range(1, n_terms):
        term = term * rates / j
        acc += term * float(special.gammaincc(n / 2.0 + j, x / 2.0))
    return np.minimum(acc, 1.0)


def f_sf(x, m, n):
    """Upper tail probability of the central F distribution with (m, n) dof.

    Evaluated through the incomplete beta function on whichever side of the
    median keeps the complement well conditioned: the direct upper-tail form
    for large x, and one minus the lower tail via the small beta argument
    m*x/(n + m*x) for small x (where the upper-tail parametrization would
    collapse tiny arguments and round the survival value to 1).
    """
    _check_dof(m, "m")
    _check_dof(n, "n")
    arr = _as_nonneg(x, "x")
    y = m * arr / (n + m * arr)
    out = np.where(
        y < 0.5,
        1.0 - special.betainc(m / 2.0, n / 2.0, np.minimum(y, 0.5)),
        special.fdtrc(m, n, arr),
    )
    return _scalar_or_array(out, arr.ndim == 0)


def _f_pdf(x, m, n):
    if x <= 0.0:
        return 0.0 if m >= 2 else math.inf
    log_pdf = (
        0.5 * m * math.log(m / n)
        + (0.5 * m - 1.0) * math.log(x)
        - 0.5 * (m + n) * math.log1p(m * x / n)
        - special.betaln(0.5 * m, 0.5 * n)
    )
    return math.exp(log_pdf) if log_pdf > -745.0 else 0.0


def f_isf(u, m, n):
    """Inverse of :func:`f_sf` in its first argument."""
    _check_dof(m, "m")
    _check_dof(n, "n")
    _check_tail_prob(u)

    def resid(x):
        return float(f_sf(x, m, n)) - u

    hi = expand_bracket_upper(resid, 2.0)
    root = solve_monotone(
        resid, 0.0, hi, fprime=lambda x: -_f_pdf(x, m, n), ftol=_ISF_RTOL * u
    )
    return max(root, 0.0)


def lemma3_ratio(u, n, lam):
    """Noncentral-to-central tail ratio at the central upper-u quantile.

    Evaluates Pr[noncentral(n, lam) >= chi2_isf(u, n)] / u; nonincreasing in
    u for fixed n and lam, which property tests check over u grids.
    """
    _check_tail_prob(u)
    return nc_chi2_sf(chi2_isf(u, n), n, lam) / u


def lemma4_ratio(theta, w, w_prime, n):
    """Ratio of chi-square tails at two scaled thresholds, chi2_sf(theta*w) / chi2_sf(theta*w').

    For 0 < w < w' the ratio is nondecreasing in theta > 0. ``w == w_prime``
    is tolerated as the degenerate constant-1 case.
    """
    if not (isinstance(theta, (int, float)) and theta > 0):
        raise InvalidParameterError(f"theta must be positive, got {theta!r}")
    if not (0.0 < w <= w_prime):
        raise InvalidParameterError(f"need 0 < w <= w_prime, got {w!r}, {w_prime!r}")
    return chi2_sf(theta * w, n) / chi2_sf(theta * w_prime, n)


def lemma5_ratio(u, m, n, h):
    """Tail-inflation ratio across numerator dof in the chi-square scale mixture.

    Both tails are those of chi-square numerators divided by an independent
    chi-square-over-dof denominator, and they share the threshold on the raw
    numerator scale: with q the upper-u point of the m-dof ratio, the value is
    Pr[(m+h)-dof ratio's numerator >= same raw threshold] / u, computed as
    f_sf(m * f_isf(u, m, n) / (m + h), m + h, n) / u. Nonincreasing in u for
    fixed m, n, h > 0. (Sharing the per-dof-normalized F quantile instead
    would not be monotone; the mixture argument fixes the raw threshold.)
    """
    _check_dof(h, "h")
    _check_tail_prob(u)
    raw_threshold = m * f_isf(u, m, n)
    return f_sf(raw_threshold / (m + h), m + h, n) / u
