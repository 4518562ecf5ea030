"""Distribution-kernel tests: frozen oracle values, round-trips, and the
tail-ratio monotonicity properties.

Frozen expected values were computed from independent oracles: adaptive
quadrature of the chi-square / F densities for tail probabilities and
quantiles, and a 1e7-draw Monte Carlo for the noncentral tail. The quadrature
oracles are also evaluated live where they are cheap.
"""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import betaln

from wbh import (
    InvalidParameterError,
    chi2_isf,
    chi2_sf,
    f_isf,
    f_sf,
    lemma3_ratio,
    lemma4_ratio,
    lemma5_ratio,
    nc_chi2_sf,
)
from wbh.dist import _nc_chi2_sf_lams

ROUNDTRIP_RTOL = 1e-12
MONOTONE_SLACK = 1e-10

# Quadrature oracle results (scipy.integrate.quad of the densities):
#   chi2_sf(3.841459, 1)            = 0.049999994653190064  (quad err 7.6e-10)
#   quantile of chi2_sf(., 1)=0.05  = 3.841458820693938
#   quantile of f_sf(., 1, 10)=0.05 = 4.964602743730724
CHI2_SF_AT_Z975_SQ = 0.049999994653190064
CHI2_ISF_005_DF1 = 3.841458820693938
F_ISF_005_1_10 = 4.964602743730724

# Monte Carlo oracle, 1e7 draws of (N(sqrt(3), 1))^2 with seed 20260809:
#   Pr[X >= 2.0] = 0.625490, binomial SE 0.000153
NC_SPOT_MC = 0.625490
NC_SPOT_MC_SE = 0.000153


def chi2_density(t, n):
    return math.exp((n / 2 - 1) * math.log(t) - t / 2 - math.lgamma(n / 2) - (n / 2) * math.log(2))


def chi2_sf_quad(x, n):
    value, _ = integrate.quad(chi2_density, x, np.inf, args=(n,), limit=200)
    return value


def f_density(t, m, n):
    return math.exp(
        (m / 2) * math.log(m / n)
        + (m / 2 - 1) * math.log(t)
        - ((m + n) / 2) * math.log1p(m * t / n)
        - betaln(m / 2, n / 2)
    )


def f_sf_quad(x, m, n):
    value, _ = integrate.quad(f_density, x, np.inf, args=(m, n), limit=200)
    return value


class TestChiSquare:
    def test_survival_at_zero(self):
        assert chi2_sf(0.0, 1.0) == 1.0
        assert chi2_sf(0.0, 7.3) == 1.0

    def test_frozen_spot_value(self):
        # Square of the 0.975 standard-normal quantile.
        assert chi2_sf(3.841459, 1.0) == pytest.approx(CHI2_SF_AT_Z975_SQ, abs=1e-12)
        assert chi2_sf(3.841459, 1.0) == pytest.approx(0.05, abs=1e-6)

    def test_live_quadrature_agreement(self):
        for x, n in [(0.3, 1.0), (2.5, 2.0), (11.0, 4.5)]:
            assert chi2_sf(x, n) == pytest.approx(chi2_sf_quad(x, n), rel=1e-9)

    def test_tail_limit(self):
        assert chi2_sf(1e4, 1.0) < 1e-300 or chi2_sf(1e4, 1.0) == 0.0

    def test_strictly_decreasing(self):
        xs = np.linspace(0.01, 30.0, 200)
        values = chi2_sf(xs, 2.5)
        assert np.all(np.diff(values) < 0)

    def test_array_input(self):
        out = chi2_sf(np.array([0.0, 1.0, 5.0]), 1.0)
        assert out.shape == (3,)
        assert out[0] == 1.0

    def test_invalid_dof(self):
        with pytest.raises(InvalidParameterError):
            chi2_sf(1.0, 0.0)
        with pytest.raises(InvalidParameterError):
            chi2_sf(1.0, -2.0)

    def test_negative_x_rejected(self):
        with pytest.raises(InvalidParameterError):
            chi2_sf(-0.1, 1.0)


class TestChiSquareInverse:
    def test_frozen_quantile(self):
        assert chi2_isf(0.05, 1.0) == pytest.approx(CHI2_ISF_005_DF1, abs=1e-10)
        assert chi2_isf(0.05, 1.0) == pytest.approx(3.841459, abs=1e-5)

    def test_left_tail_near_zero(self):
        assert chi2_isf(1.0 - 1e-12, 1.0) < 1e-20

    def test_inverse_identity_on_x(self):
        # The x-space identity is limited by conditioning where the density is
        # small (u near 1); the u-space round-trip below is the tight contract.
        for x in (0.1, 1.0, 10.0):
            for n in (1.0, 3.0, 10.0):
                assert chi2_isf(chi2_sf(x, n), n) == pytest.approx(x, rel=1e-6)

    @pytest.mark.parametrize("n", [0.5, 1.0, 2.0, 7.5, 40.0])
    def test_roundtrip_grid(self, n):
        for u in np.geomspace(1e-10, 0.5, 25).tolist() + [0.9, 0.99, 1 - 1e-10]:
            assert chi2_sf(chi2_isf(u, n), n) == pytest.approx(u, rel=ROUNDTRIP_RTOL)

    def test_invalid_inputs(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(InvalidParameterError):
                chi2_isf(bad, 1.0)
        with pytest.raises(InvalidParameterError):
            chi2_isf(1e-301, 1.0)  # below the supported tail range


class TestNoncentralChiSquare:
    def test_zero_noncentrality_is_central(self):
        xs = np.array([0.0, 0.5, 2.0, 9.0])
        assert np.max(np.abs(nc_chi2_sf(xs, 1.0, 0.0) - chi2_sf(xs, 1.0))) <= 1e-13

    def test_noncentrality_inflates_tail(self):
        central = chi2_sf(3.841459, 1.0)
        value = nc_chi2_sf(3.841459, 1.0, 1.0)
        assert central < value < 1.0

    def test_monte_carlo_spot(self):
        assert nc_chi2_sf(2.0, 1.0, 3.0) == pytest.approx(NC_SPOT_MC, abs=3 * NC_SPOT_MC_SE)

    def test_monotone_in_noncentrality(self):
        lams = np.linspace(0.0, 12.0, 60)
        values = [nc_chi2_sf(5.0, 1.0, lam) for lam in lams]
        assert np.all(np.diff(values) >= 0)

    def test_large_noncentrality_stable(self):
        value = nc_chi2_sf(900.0, 1.0, 1000.0)
        assert 0.0 < value < 1.0

    def test_vectorized_lams_matches_scalar(self):
        lams = np.array([0.0, 0.3, 2.0, 9.0, 40.0])
        batch = _nc_chi2_sf_lams(4.0, 1.0, lams)
        single = np.array([nc_chi2_sf(4.0, 1.0, lam) for lam in lams])
        assert np.max(np.abs(batch - single)) <= 1e-13

    def test_invalid_noncentrality(self):
        with pytest.raises(InvalidParameterError):
            nc_chi2_sf(1.0, 1.0, -0.5)


class TestFDistribution:
    def test_survival_at_zero(self):
        assert f_sf(0.0, 1.0, 10.0) == 1.0
        assert f_sf(0.0, 3.0, 7.0) == 1.0

    def test_frozen_quantile(self):
        # Square of the two-sided t(10) critical value at 0.05.
        assert f_isf(0.05, 1.0, 10.0) == pytest.approx(F_ISF_005_1_10, abs=1e-9)
        assert f_isf(0.05, 1.0, 10.0) == pytest.approx(4.9646, abs=1e-3)

    def test_live_quadrature_agreement(self):
        for x, m, n in [(0.7, 1.0, 10.0), (3.0, 2.0, 8.0), (1.2, 5.5, 3.5)]:
            assert f_sf(x, m, n) == pytest.approx(f_sf_quad(x, m, n), rel=1e-9)

    @pytest.mark.parametrize("m,n", [(1.0, 10.0), (1.0, 2.5), (4.0, 4.0), (10.0, 40.0)])
    def test_roundtrip_grid(self, m, n):
        for u in [0.01, 0.5, 0.9] + np.geomspace(1e-10, 0.3, 15).tolist() + [1 - 1e-10]:
            assert f_sf(f_isf(u, m, n), m, n) == pytest.approx(u, rel=ROUNDTRIP_RTOL)

    def test_strictly_decreasing(self):
        xs = np.linspace(0.01, 20.0, 150)
        assert np.all(np.diff(f_sf(xs, 1.0, 10.0)) < 0)

    def test_invalid_dof(self):
        with pytest.raises(InvalidParameterError):
            f_sf(1.0, 0.0, 10.0)
        with pytest.raises(InvalidParameterError):
            f_isf(0.1, 1.0, -1.0)


class TestLemmaRatios:
    """Numeric monotonicity diagnostics behind the FDR control argument."""

    def test_lemma3_central_limit_is_one(self):
        for u in (0.05, 0.3, 0.9):
            assert lemma3_ratio(u, 1.0, 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_lemma3_nonincreasing_in_u(self):
        grid = np.linspace(0.01, 0.99, 99)
        values = [lemma3_ratio(u, 1.0, 2.0) for u in grid]
        assert np.all(np.diff(values) <= MONOTONE_SLACK)

    def test_lemma3_threshold_collapse(self):
        # As u -> 1 the central quantile goes to 0 and the ratio approaches 1.
        assert lemma3_ratio(1 - 1e-9, 1.0, 5.0) == pytest.approx(1.0, abs=1e-6)

    def test_lemma5_small_h_limit(self):
        for u in (0.05, 0.5):
            assert lemma5_ratio(u, 1.0, 10.0, 1e-10) == pytest.approx(1.0, rel=1e-6)

    def test_lemma5_nonincreasing_in_u(self):
        grid = np.linspace(0.01, 0.99, 99)
        values = [lemma5_ratio(u, 1.0, 10.0, 2.0) for u in grid]
        assert np.all(np.diff(values) <= MONOTONE_SLACK)
        assert values[49] >= values[89]  # u=0.5 dominates u=0.9

    def test_lemma4_small_theta_limit(self):
        assert lemma4_ratio(1e-12, 1.0, 2.0, 3.0) == pytest.approx(1.0, abs=1e-9)

    def test_lemma4_nondecreasing_in_theta(self):
        grid = np.linspace(0.1, 10.0, 99)
        values = [lemma4_ratio(theta, 1.0, 2.0, 3.0) for theta in grid]
        assert np.all(np.diff(values) >= -MONOTONE_SLACK)

    def test_lemma4_equal_weights_degenerate(self):
        for theta in (0.5, 2.0, 8.0):
            assert lemma4_ratio(theta, 1.5, 1.5, 3.0) == 1.0

    def test_lemma4_invalid_order(self):
        with pytest.raises(InvalidParameterError):
            lemma4_ratio(1.0, 2.0, 1.0, 3.0)
