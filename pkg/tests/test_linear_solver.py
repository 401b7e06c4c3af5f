import math

import numpy as np
import pytest
from scipy import integrate, optimize

from ambistop.models import (
    AmbiguityParams, DigitalAsymmetric, EvenKink, LinearRegime, PeriodicCosine, UserTable,
)
from ambistop.solvers.linear import (
    UcLinear, calibrate_digital_kappa, compute_exponents, solve_digital, solve_even,
    solve_periodic_cosine, solve_symmetric_periodic, stationary_density_linear,
)
from ambistop.utils.errors import NoStationaryLaw, NotEven, NotUnimodal, SymmetryViolation

from conftest import COSINE_THRESHOLDS, DIGITAL_KINK, DIGITAL_SMOOTH, RECOVERED_DIGITAL_KAPPA


class TestExponents:
    def test_driftless_case(self):
        e = compute_exponents(AmbiguityParams(kappa=0.0, r=0.02, a_norm=0.1))
        assert e.psi == pytest.approx(2.0, rel=1e-14)
        assert e.phi == pytest.approx(-2.0, rel=1e-14)

    def test_vieta_relations(self):
        p = AmbiguityParams(kappa=0.07, r=0.04, a_norm=0.3)
        e = compute_exponents(p)
        assert e.psi + e.phi == pytest.approx(2 * p.kappa / p.a_norm, rel=1e-13)
        assert e.psi * e.phi == pytest.approx(-2 * p.r / p.a_norm ** 2, rel=1e-13)
        assert e.psi_hat == -e.phi and e.phi_hat == -e.psi


class TestUcLinear:
    @pytest.fixture
    def uc(self):
        p = AmbiguityParams(kappa=0.05, r=0.03, a_norm=0.2)
        return p, UcLinear(compute_exponents(p), 0.4)

    def test_normalization_at_reference(self, uc):
        _, u = uc
        assert u(0.4) == pytest.approx(1.0, abs=1e-15)
        assert u.derivative(0.4) == pytest.approx(0.0, abs=1e-14)

    def test_is_the_larger_branch(self, uc):
        _, u = uc
        y = np.linspace(-3, 3, 301)
        np.testing.assert_allclose(u(y), np.maximum(u.h1(y), u.h2(y)), rtol=1e-14)

    def test_solves_broken_drift_equation(self, uc):
        p, u = uc
        y = np.concatenate([np.linspace(-3, 0.39, 50), np.linspace(0.41, 3, 50)])
        a = p.a_norm
        residual = (0.5 * a ** 2 * u.second_derivative(y)
                    - p.kappa * np.sign(y - 0.4) * a * u.derivative(y) - p.r * u(y))
        assert np.max(np.abs(residual) / u(y)) <= 1e-10

    def test_convex_and_at_least_one(self, uc):
        _, u = uc
        y = np.linspace(-4, 4, 401)
        assert np.all(u.second_derivative(y) > 0)
        assert np.all(u(y) >= 1.0 - 1e-15)

    def test_even_when_centered_at_zero(self):
        u = UcLinear(compute_exponents(AmbiguityParams(kappa=0.1, r=0.05, a_norm=1.0)), 0.0)
        y = np.linspace(0, 5, 51)
        np.testing.assert_allclose(u(y), u(-y), rtol=1e-15)

    def test_infinite_references_are_pure_exponentials(self):
        e = compute_exponents(AmbiguityParams(kappa=0.1, r=0.05, a_norm=1.0))
        assert UcLinear(e, -math.inf)(1.0) == pytest.approx(math.exp(e.psi), rel=1e-15)
        assert UcLinear(e, math.inf)(1.0) == pytest.approx(math.exp(-e.psi), rel=1e-15)


class TestEvenSolver:
    def test_driftless_threshold_solves_hyperbolic_condition(self):
        p = AmbiguityParams(kappa=0.0, r=0.02, a_norm=0.1)
        sol = solve_even(p, EvenKink(k1=1.0))
        expected = optimize.brentq(lambda x: 2 * x * math.tanh(2 * x) - 1, 0.1, 2.0, xtol=1e-14)
        assert sol.thresholds[1] == pytest.approx(expected, abs=1e-10)
        assert sol.thresholds[0] == -sol.thresholds[1]
        assert sol.c_star == 0.0

    def test_smooth_fit_at_threshold(self, even_params, even_payoff):
        sol = solve_even(even_params, even_payoff)
        x = sol.thresholds[1]
        u0 = UcLinear(compute_exponents(even_params), 0.0)
        assert sol.lambda_star * u0.derivative(x) == pytest.approx(even_payoff.k1, rel=1e-9)

    def test_generic_path_agrees_with_closed_form(self, even_params):
        table = UserTable(samples=[(float(x), abs(float(x))) for x in np.linspace(-30, 30, 6001)])
        closed = solve_even(even_params, EvenKink(k1=1.0))
        generic = solve_even(even_params, table)
        assert generic.thresholds[1] == pytest.approx(closed.thresholds[1], abs=1e-3)

    def test_value_is_nonincreasing_in_kappa(self, even_payoff):
        values = [
            solve_even(AmbiguityParams(kappa=k, r=0.03, a_norm=0.1), even_payoff).value(0.0)
            for k in (0.0, 0.01, 0.02, 0.05, 0.1)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_rejects_asymmetric_payoff(self, even_params, digital_smooth_payoff):
        with pytest.raises(NotEven):
            solve_even(even_params, digital_smooth_payoff)

    def test_reports_several_ratio_maxima(self, even_params):
        table = UserTable(samples=[
            (-4.0, 0.0), (-3.0, 1.2), (-2.0, 0.0), (-1.0, 1.0), (0.0, 0.0),
            (1.0, 1.0), (2.0, 0.0), (3.0, 1.2), (4.0, 0.0),
        ])
        with pytest.raises(NotUnimodal) as excinfo:
            solve_even(even_params, table)
        assert len(excinfo.value.details["maxima"]) >= 2


class TestDigitalSolver:
    def test_smooth_fit_regime(self, digital_params, digital_smooth_payoff):
        sol = solve_digital(digital_params, digital_smooth_payoff)
        assert sol.regime == LinearRegime.DIGITAL_SMOOTH_FIT
        assert sol.c_star == pytest.approx(DIGITAL_SMOOTH["c_star"], abs=1e-4)
        assert sol.thresholds[0] == pytest.approx(DIGITAL_SMOOTH["x2"], abs=1e-4)
        assert sol.thresholds[1] == pytest.approx(DIGITAL_SMOOTH["x1"], abs=1e-4)

    def test_smooth_fit_at_both_boundaries(self, digital_params, digital_smooth_payoff):
        sol = solve_digital(digital_params, digital_smooth_payoff)
        uc = UcLinear(compute_exponents(digital_params), sol.c_star)
        x2, x1 = sol.thresholds
        assert sol.lambda_star * uc.derivative(x1) == pytest.approx(digital_smooth_payoff.k2, rel=1e-8)
        assert sol.lambda_star * uc.derivative(x2) == pytest.approx(-digital_smooth_payoff.k1, rel=1e-8)

    def test_kink_regime(self, digital_params, digital_kink_payoff):
        sol = solve_digital(digital_params, digital_kink_payoff)
        assert sol.regime == LinearRegime.DIGITAL_KINK_AT_ZERO
        assert sol.c_star == pytest.approx(DIGITAL_KINK["c_star"], abs=1e-4)
        assert sol.thresholds[0] == pytest.approx(DIGITAL_KINK["x2"], abs=1e-4)
        assert sol.thresholds[1] == 0.0
        assert sol.diagnostics["x1_at_c_hat"] < 0

    def test_kink_regime_loses_smooth_fit_at_the_jump(self, digital_params, digital_kink_payoff):
        sol = solve_digital(digital_params, digital_kink_payoff)
        uc = UcLinear(compute_exponents(digital_params), sol.c_star)
        assert sol.value(0.0) == pytest.approx(digital_kink_payoff.k3, rel=1e-12)
        assert abs(sol.lambda_star * uc.derivative(0.0) - digital_kink_payoff.k2) > 0.1

    def test_value_dominates_payoff(self, digital_params, digital_smooth_payoff):
        sol = solve_digital(digital_params, digital_smooth_payoff)
        y = np.linspace(-3, 3, 601)
        assert np.all(sol.value(y) >= digital_smooth_payoff.evaluate(y) - 1e-12)

    def test_scale_invariance(self, digital_params, digital_smooth_payoff):
        base = solve_digital(digital_params, digital_smooth_payoff)
        scaled = solve_digital(digital_params, DigitalAsymmetric(k1=3.0, k2=1.5, k3=1.05))
        assert scaled.c_star == pytest.approx(base.c_star, abs=1e-10)
        np.testing.assert_allclose(scaled.thresholds, base.thresholds, atol=1e-10)
        assert scaled.lambda_star == pytest.approx(3 * base.lambda_star, rel=1e-9)

    def test_calibration_recovers_kappa(self, digital_params, digital_smooth_payoff):
        kappa = calibrate_digital_kappa(digital_params, digital_smooth_payoff, DIGITAL_SMOOTH["c_star"])
        assert kappa == pytest.approx(RECOVERED_DIGITAL_KAPPA, abs=5e-4)


class TestPeriodicSolver:
    def test_cosine_thresholds(self, cosine_params):
        sol = solve_periodic_cosine(cosine_params)
        assert sol.regime == LinearRegime.PERIODIC_MULTI_BOUNDARY
        np.testing.assert_allclose(sol.thresholds, COSINE_THRESHOLDS, atol=1e-4)
        assert sol.c_star == pytest.approx(-math.pi, abs=1e-15)
        assert sol.period == pytest.approx(2 * math.pi)

    def test_generic_symmetric_solver_agrees(self, cosine_params):
        closed = solve_periodic_cosine(cosine_params)
        generic = solve_symmetric_periodic(cosine_params, PeriodicCosine(), 2 * math.pi, 0.0)
        np.testing.assert_allclose(generic.thresholds, closed.thresholds, atol=1e-9)
        assert generic.lambda_star == pytest.approx(closed.lambda_star, rel=1e-9)

    def test_value_repeats_and_dominates(self, cosine_params):
        sol = solve_periodic_cosine(cosine_params)
        y = np.linspace(-2 * math.pi, 2 * math.pi, 201)
        np.testing.assert_allclose(sol.value(y), sol.value(y + 2 * math.pi), rtol=1e-9, atol=1e-12)
        assert np.all(sol.value(y) >= np.cos(y) - 1e-12)

    def test_membership_between_centers(self, cosine_params):
        sol = solve_periodic_cosine(cosine_params)
        assert sol.in_continuation(math.pi)
        assert sol.in_continuation(3 * math.pi)
        assert sol.in_stopping_set(0.0)
        assert sol.generator.theta(math.pi + 0.1) == cosine_params.kappa

    def test_rejects_non_periodic_payoff(self, cosine_params, digital_smooth_payoff):
        with pytest.raises(SymmetryViolation):
            solve_symmetric_periodic(cosine_params, digital_smooth_payoff, 2 * math.pi, 0.0)


class TestStationaryLaw:
    def test_laplace_density_integrates_to_one(self):
        p = AmbiguityParams(kappa=0.5, r=0.1, a_norm=1.0)
        left, _ = integrate.quad(lambda y: stationary_density_linear(p, 0.3, y), -np.inf, 0.3)
        right, _ = integrate.quad(lambda y: stationary_density_linear(p, 0.3, y), 0.3, np.inf)
        assert left == pytest.approx(0.5, rel=1e-10)
        assert right == pytest.approx(0.5, rel=1e-10)

    def test_requires_positive_kappa(self):
        with pytest.raises(NoStationaryLaw):
            stationary_density_linear(AmbiguityParams(kappa=0.0, r=0.1, a_norm=1.0), 0.0, 1.0)
