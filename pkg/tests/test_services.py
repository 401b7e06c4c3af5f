import numpy as np
import pytest

from ambistop.config.settings import Settings
from ambistop.models import LinearRegime, ProblemSpec, RadialRegime
from ambistop.services import SolverService, solve_problem
from ambistop.utils.errors import ParameterError

from conftest import DIGITAL_SMOOTH, STRADDLE_K4


@pytest.fixture
def service():
    return SolverService(Settings(grid_n=4001, mc_paths=4000, mc_dt=0.01, mc_horizon=200.0, seed=7))


def _spec(data, **options):
    data = dict(data)
    if options:
        data["options"] = options
    return ProblemSpec.model_validate(data)


def _linear(payoff, **extra):
    return {"case": "linear", "kappa": 0.02, "r": 0.03, "a_norm": 0.1, "payoff": payoff, **extra}


def _radial(payoff, **extra):
    return {"case": "radial", "kappa": 0.02, "r": 0.1, "dim": 5, "chart": "radius", "payoff": payoff, **extra}


class TestDispatch:
    @pytest.mark.parametrize(
        "data, regime",
        [
            (_linear({"kind": "EvenKink", "k1": 1.0}), LinearRegime.SYMMETRIC_TWO_SIDED),
            (_linear({"kind": "PeriodicCosine"}), LinearRegime.PERIODIC_MULTI_BOUNDARY),
            (_linear({"kind": "UserTable", "samples": [[-1.0, 1.0], [0.0, 0.0], [1.0, 1.0]]}),
             LinearRegime.GENERIC_REPRESENTATION),
            (_radial({"kind": "Straddle", "K": 4.0}), RadialRegime.TWO_BOUNDARY),
            (_radial({"kind": "IdentityRadial"}), RadialRegime.SINGLE_UPPER_BOUNDARY),
        ],
    )
    def test_routes_by_payoff_kind(self, data, regime):
        assert solve_problem(ProblemSpec.model_validate(data)).regime == regime

    def test_digital(self, digital_spec_dict):
        sol = solve_problem(ProblemSpec.model_validate(digital_spec_dict))
        assert sol.regime == LinearRegime.DIGITAL_SMOOTH_FIT
        assert sol.c_star == pytest.approx(DIGITAL_SMOOTH["c_star"], abs=1e-4)


class TestSolveReport:
    def test_summary_and_echo(self, service, digital_spec_dict):
        spec = ProblemSpec.model_validate(digital_spec_dict)
        report, sol = service.solve(spec)
        assert report.solution.c_star == pytest.approx(DIGITAL_SMOOTH["c_star"], abs=1e-4)
        assert report.solution.thresholds == pytest.approx([DIGITAL_SMOOTH["x2"], DIGITAL_SMOOTH["x1"]], abs=1e-4)
        assert report.solution.value_at_ref == pytest.approx(sol.value(report.solution.y_ref))
        assert ProblemSpec.model_validate(report.problem) == spec
        assert report.mc is None and report.pde is None

    def test_deterministic_apart_from_run_info(self, service, straddle_spec_dict):
        spec = ProblemSpec.model_validate(straddle_spec_dict)
        first, _ = service.solve(spec)
        second, _ = service.solve(spec)
        assert first.deterministic_dict() == second.deterministic_dict()
        assert first.solution.c_star == pytest.approx(STRADDLE_K4["c_star"], rel=1e-3)

    def test_reference_point_override(self, service, digital_spec_dict):
        report, _ = service.solve(_spec(digital_spec_dict, y_ref=-0.2))
        assert report.solution.y_ref == -0.2

    def test_sample_table(self, service, digital_spec_dict):
        spec = ProblemSpec.model_validate(digital_spec_dict)
        _, sol = service.solve(spec)
        table = service.sample_table(spec, sol)
        assert list(table.columns) == ["y", "payoff", "value", "in_stopping_set"]
        assert len(table) == 2001
        width = DIGITAL_SMOOTH["x1"] - DIGITAL_SMOOTH["x2"]
        assert table["y"].iloc[0] == pytest.approx(DIGITAL_SMOOTH["x2"] - 0.5 * width, abs=1e-4)
        stop = table["in_stopping_set"].to_numpy()
        np.testing.assert_array_equal(table["value"][stop], table["payoff"][stop])
        assert np.all(table["value"] >= table["payoff"] - 1e-12)

    def test_radial_table_starts_at_origin(self, service, straddle_spec_dict):
        spec = _spec(straddle_spec_dict)
        spec = spec.with_parameter("K", 0.5)
        _, sol = service.solve(spec)
        table = service.sample_table(spec, sol)
        assert table["y"].iloc[0] == 0.0


class TestVerify:
    def test_pde_check_digital(self, service, digital_spec_dict):
        report = service.verify(ProblemSpec.model_validate(digital_spec_dict), pde=True)
        assert report.pde.passed
        assert report.passed is True
        assert all(d <= 2 * report.pde.spacing for d in report.pde.threshold_deltas)

    def test_pde_check_periodic(self, service):
        report = service.verify(ProblemSpec.model_validate(_linear({"kind": "PeriodicCosine"})), pde=True)
        assert len(report.pde.analytic_thresholds) == 4
        assert report.pde.passed

    def test_pde_check_fails_on_a_bad_grid(self, service, digital_spec_dict):
        spec = _spec(digital_spec_dict, grid_lo=-0.3, grid_hi=0.1, grid_n=101)
        report = service.verify(spec, pde=True)
        assert report.passed is False
        assert report.warnings

    def test_small_sample_is_inconclusive(self, service, digital_spec_dict):
        report = service.verify(ProblemSpec.model_validate(digital_spec_dict), mc=True, paths=100, seed=3)
        assert report.mc.conclusive is False
        assert report.mc.passed is None
        assert report.passed is None
        assert report.seed == 3
        assert any("conclusive" in w for w in report.warnings)

    @pytest.mark.slow
    def test_mc_check_digital(self, service, digital_spec_dict):
        report = service.verify(ProblemSpec.model_validate(digital_spec_dict), mc=True, paths=8000)
        assert report.mc.conclusive
        assert report.mc.passed
        assert report.mc.fraction_stopped >= 0.999


class TestSweep:
    def test_kappa_sweep_is_monotone(self, service, straddle_spec_dict):
        spec = ProblemSpec.model_validate(straddle_spec_dict).with_parameter("K", 0.5)
        report, table = service.sweep(spec, "kappa", [0.0, 0.01, 0.02])
        assert report.sweep.monotone is True
        assert list(table["kappa"]) == [0.0, 0.01, 0.02]
        assert table["monotone"].all()
        values = table["value_at_ref"].to_numpy()
        assert np.all(np.diff(values) <= 1e-12)

    def test_strike_sweep_single_branch(self, service, straddle_spec_dict):
        spec = ProblemSpec.model_validate(straddle_spec_dict)
        _, table = service.sweep(spec, "K", [0.2, 0.5, 0.8])
        assert set(table["regime"]) == {RadialRegime.SINGLE_UPPER_BOUNDARY.value}
        assert np.all(np.diff(table["threshold_1"].to_numpy()) > 0)
        assert "monotone" not in table.columns

    def test_regime_flips_once_across_critical_strike(self, service, straddle_spec_dict):
        spec = ProblemSpec.model_validate(straddle_spec_dict)
        _, table = service.sweep(spec, "K", [0.5, 1.0, 2.0, 2.5, 4.0])
        regimes = list(table["regime"])
        flips = sum(a != b for a, b in zip(regimes, regimes[1:]))
        assert flips == 1
        assert regimes[0] == RadialRegime.SINGLE_UPPER_BOUNDARY.value
        assert regimes[-1] == RadialRegime.TWO_BOUNDARY.value

    def test_strike_needs_straddle(self, service, digital_spec_dict):
        with pytest.raises(ParameterError):
            service.sweep(ProblemSpec.model_validate(digital_spec_dict), "K", [1.0])
