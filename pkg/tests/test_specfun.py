import math

import mpmath
import numpy as np
import pytest
from scipy import special

from ambistop import specfun
from ambistop.specfun import (
    SpecFunConfig, gamma_upper, kummer_m, tricomi_u, whittaker_m, whittaker_w,
)
from ambistop.utils.errors import NoConvergence, ParameterError

mpmath.mp.dps = 30


def _five_point(f, z, h):
    f2p, f1p, f0, f1m, f2m = f(z + 2 * h), f(z + h), f(z), f(z - h), f(z - 2 * h)
    first = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h)
    second = (-f2p + 16 * f1p - 30 * f0 + 16 * f1m - f2m) / (12 * h * h)
    return f0, first, second


class TestKummer:
    def test_exponential_identity(self):
        assert kummer_m(1.0, 1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0.3, 1.5), (-2.5, 4.0), (7.0, 0.5)])
    def test_origin_normalization(self, a, b):
        assert kummer_m(a, b, 0.0) == 1.0

    def test_matches_extended_precision_series(self):
        expected = float(mpmath.hyp1f1(2, 4, 3))
        assert kummer_m(2.0, 4.0, 3.0) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("a,b,z", [(1.9106466, 4.0, 4.234), (0.5, 1.5, 0.7), (2.4, 4.0, 12.0)])
    def test_matches_scipy(self, a, b, z):
        assert kummer_m(a, b, z) == pytest.approx(float(special.hyp1f1(a, b, z)), rel=1e-9)

    def test_rejects_nonpositive_integer_b(self):
        with pytest.raises(ParameterError):
            kummer_m(1.0, -2.0, 1.0)

    def test_rejects_negative_argument(self):
        with pytest.raises(ParameterError):
            kummer_m(1.0, 2.0, -0.5)

    def test_reports_exhausted_series(self):
        with pytest.raises(NoConvergence):
            kummer_m(1.0, 1.0, 45.0, SpecFunConfig(max_terms=50))

    @pytest.mark.parametrize("a,b", [(1.3, 2.5), (1.6, 4.0), (2.4, 4.0)])
    def test_ode_residual(self, a, b):
        for z in np.geomspace(0.1, 40.0, 12):
            h = 1e-2 * min(1.0, z)
            m, dm, d2m = _five_point(lambda x: kummer_m(a, b, x), z, h)
            residual = z * d2m + (b - z) * dm - a * m
            assert abs(residual) / abs(m) <= 1e-6

    @pytest.mark.parametrize("z", [40.0, 50.0, 60.0])
    def test_series_and_asymptotic_branches_overlap(self, z):
        series = kummer_m(1.7, 4.0, z, SpecFunConfig(large_z=70.0))
        asymptotic = kummer_m(1.7, 4.0, z, SpecFunConfig(large_z=30.0))
        assert asymptotic == pytest.approx(series, rel=1e-5)

    def test_scaled_form_stays_finite_for_large_argument(self):
        z = 900.0
        expected = float(mpmath.exp(-z) * mpmath.hyp1f1(1.9, 4, z))
        assert kummer_m(1.9, 4.0, z, scaled=True) == pytest.approx(expected, rel=1e-8)


class TestTricomi:
    def test_leading_asymptotic_order(self):
        a, b, z = 1.8, 4.0, 1e6
        assert tricomi_u(a, b, z) * z ** a == pytest.approx(1.0, abs=1e-3)

    def test_exponential_integral_identity(self):
        expected = float(mpmath.e * mpmath.e1(1))
        assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(0.596347, abs=1e-6)

    def test_defining_integral(self):
        a, b, z = 0.5, 0.0, 2.0
        integral = mpmath.quad(
            lambda t: mpmath.exp(-z * t) * t ** (a - 1) * (1 + t) ** (b - a - 1), [0, 1, mpmath.inf]
        ) / mpmath.gamma(a)
        assert tricomi_u(a, b, z) == pytest.approx(float(integral), rel=1e-10)

    @pytest.mark.parametrize("a,b,z", [(1.6, 4.0, 0.05), (2.4, 4.0, 3.0), (0.7, 1.0, 1e-6), (2.0, 2.0, 250.0)])
    def test_matches_extended_precision(self, a, b, z):
        assert tricomi_u(a, b, z) == pytest.approx(float(mpmath.hyperu(a, b, z)), rel=1e-10)

    @pytest.mark.parametrize("a,b,z", [(1.6, 4.0, 3.0), (2.4, 4.0, 8.0)])
    def test_matches_scipy(self, a, b, z):
        assert tricomi_u(a, b, z) == pytest.approx(float(special.hyperu(a, b, z)), rel=1e-7)

    @pytest.mark.parametrize("a,b", [(1.3, 1.5), (1.6, 4.0)])
    def test_ode_residual(self, a, b):
        for z in np.geomspace(1.5, 40.0, 10):
            h = 5e-3 * min(1.0, z)
            u, du, d2u = _five_point(lambda x: tricomi_u(a, b, x), z, h)
            residual = z * d2u + (b - z) * du - a * u
            assert abs(residual) / abs(u) <= 1e-6

    def test_rejects_invalid_arguments(self):
        with pytest.raises(ParameterError):
            tricomi_u(0.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            tricomi_u(1.0, 1.0, 0.0)


class TestWhittaker:
    def test_hyperbolic_sine_identity(self):
        assert whittaker_m(0.0, 0.5, 1.0) == pytest.approx(2.0 * math.sinh(0.5), rel=1e-12)

    def test_small_argument_normalization(self):
        kappa, mu, z = 0.3, 1.5, 1e-8
        assert whittaker_m(kappa, mu, z) / z ** (mu + 0.5) == pytest.approx(1.0, rel=1e-6)

    def test_radial_parameters_match_extended_precision(self):
        kappa, r, d, y = 0.02, 0.1, 5, 2.0
        gam = math.sqrt(kappa ** 2 + 2 * r)
        a_kappa = kappa * (d - 1) / (2 * gam)
        mu = d / 2 - 1
        z = 2 * gam * y
        expected = float(mpmath.whitm(a_kappa, mu, z))
        assert whittaker_m(a_kappa, mu, z) == pytest.approx(expected, rel=1e-12)
        expected_w = float(mpmath.whitw(a_kappa, mu, z))
        assert whittaker_w(a_kappa, mu, z) == pytest.approx(expected_w, rel=1e-10)

    def test_wronskian_is_constant(self):
        kappa, mu = 0.04, 1.5
        values = []
        for z in np.geomspace(0.1, 50.0, 15):
            h = 1e-3 * z
            m, dm, _ = _five_point(lambda x: whittaker_m(kappa, mu, x), z, h)
            w, dw, _ = _five_point(lambda x: whittaker_w(kappa, mu, x), z, h)
            values.append(m * dw - dm * w)
        values = np.array(values)
        expected = -math.gamma(1 + 2 * mu) / math.gamma(0.5 + mu - kappa)
        assert np.max(np.abs(values / values[0] - 1.0)) <= 1e-6
        assert values[0] == pytest.approx(expected, rel=1e-6)


class TestGammaUpper:
    def test_complete_gamma_at_zero(self):
        assert gamma_upper(5.0, 0.0) == pytest.approx(24.0, rel=1e-12)

    def test_exponential_identity(self):
        assert gamma_upper(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)

    @pytest.mark.parametrize("s,x", [(2.5, 1.3), (3.0, 10.0), (5.0, 2.0), (0.4, 7.5)])
    def test_matches_extended_precision(self, s, x):
        assert gamma_upper(s, x) == pytest.approx(float(mpmath.gammainc(s, x)), rel=1e-12)

    def test_decreasing_in_x(self):
        xs = np.linspace(0.0, 30.0, 61)
        values = [gamma_upper(5.0, x) for x in xs]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_rejects_nonpositive_shape(self):
        with pytest.raises(ParameterError):
            gamma_upper(0.0, 1.0)


def test_public_surface():
    assert set(specfun.__all__) == {
        "SpecFunConfig", "DEFAULT_CONFIG", "kummer_m", "tricomi_u",
        "whittaker_m", "whittaker_w", "gamma", "gamma_upper",
    }
    assert all(callable(getattr(specfun, name)) for name in specfun.__all__ if name != "DEFAULT_CONFIG")
