import io
import json

import pandas as pd
import pytest

from ambistop.cli import EXIT_OK, EXIT_SOLVER, EXIT_SPEC, EXIT_VERIFY, build_parser, main
from ambistop.config.settings import Settings
from ambistop.models import ProblemSpec

from conftest import DIGITAL_SMOOTH


@pytest.fixture
def settings():
    return Settings(log_level="WARNING", grid_n=4001, mc_dt=0.01, mc_horizon=200.0, seed=7)


@pytest.fixture
def write_spec(tmp_path):
    def write(data, name="spec.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return str(path)

    return write


def _run(argv, settings, capsys):
    code = main(argv, settings=settings)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_json_report(self, write_spec, digital_spec_dict, settings, capsys):
        code, out, _ = _run(["solve", write_spec(digital_spec_dict)], settings, capsys)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["schema"] == "1"
        assert report["command"] == "solve"
        assert report["solution"]["c_star"] == pytest.approx(DIGITAL_SMOOTH["c_star"], abs=1e-4)

    def test_straddle_regime(self, write_spec, straddle_spec_dict, settings, capsys):
        code, out, _ = _run(["solve", write_spec(straddle_spec_dict)], settings, capsys)
        assert code == EXIT_OK
        assert json.loads(out)["solution"]["regime"] == "TwoBoundary"

    def test_csv_table_to_file(self, write_spec, digital_spec_dict, settings, tmp_path, capsys):
        out_path = tmp_path / "table.csv"
        code, _, _ = _run(
            ["solve", write_spec(digital_spec_dict), "--format", "csv", "--out", str(out_path)], settings, capsys,
        )
        assert code == EXIT_OK
        table = pd.read_csv(out_path)
        assert list(table.columns) == ["y", "payoff", "value", "in_stopping_set"]
        assert len(table) == 2001

    def test_report_round_trip(self, write_spec, digital_spec_dict, settings, capsys):
        _, out, _ = _run(["solve", write_spec(digital_spec_dict)], settings, capsys)
        problem = json.loads(out)["problem"]
        assert ProblemSpec.model_validate(problem).model_dump(mode="json") == problem

    def test_identical_runs_give_identical_reports(self, write_spec, digital_spec_dict, settings, capsys):
        path = write_spec(digital_spec_dict)
        reports = []
        for _ in range(2):
            _, out, _ = _run(["solve", path], settings, capsys)
            data = json.loads(out)
            data.pop("run_info")
            reports.append(data)
        assert reports[0] == reports[1]


def test_usage_names_module_invocation():
    assert build_parser().format_usage().startswith("usage: python -m ambistop")


class TestErrors:
    def test_missing_field_names_it(self, write_spec, digital_spec_dict, settings, capsys):
        data = dict(digital_spec_dict)
        del data["kappa"]
        code, _, err = _run(["solve", write_spec(data)], settings, capsys)
        assert code == EXIT_SPEC
        assert "kappa" in err

    def test_malformed_json(self, write_spec, settings, capsys):
        code, _, err = _run(["solve", write_spec('{"case": "linear",')], settings, capsys)
        assert code == EXIT_SPEC
        assert "invalid spec" in err

    def test_missing_file(self, tmp_path, settings, capsys):
        code, _, err = _run(["solve", str(tmp_path / "nope.json")], settings, capsys)
        assert code == EXIT_SPEC
        assert "cannot read" in err

    def test_solver_error(self, write_spec, settings, capsys):
        spec = {
            "case": "radial", "kappa": 0.02, "r": 0.1, "dim": 5,
            "payoff": {"kind": "UserTable", "samples": [[0, 0], [1, 1], [2, 0], [3, 1.5], [4, 0]]},
        }
        code, _, err = _run(["solve", write_spec(spec)], settings, capsys)
        assert code == EXIT_SOLVER
        assert "NotUnimodal" in err

    def test_unknown_sweep_parameter(self, write_spec, digital_spec_dict, settings):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", write_spec(digital_spec_dict), "--param", "dim", "--values", "1,2"], settings=settings)
        assert exc.value.code == 2


class TestVerify:
    def test_pde_pass(self, write_spec, digital_spec_dict, settings, capsys):
        code, out, _ = _run(["verify", write_spec(digital_spec_dict), "--pde"], settings, capsys)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["pde"]["passed"] is True
        assert report["mc"] is None

    def test_small_sample_warns_but_succeeds(self, write_spec, digital_spec_dict, settings, capsys):
        code, out, _ = _run(
            ["verify", write_spec(digital_spec_dict), "--mc", "--paths", "100", "--seed", "7"], settings, capsys,
        )
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["mc"]["conclusive"] is False
        assert report["seed"] == 7
        assert report["warnings"]

    def test_failed_check_exit_code(self, write_spec, digital_spec_dict, settings, capsys):
        data = dict(digital_spec_dict, options={"grid_lo": -0.3, "grid_hi": 0.1, "grid_n": 101})
        code, out, _ = _run(["verify", write_spec(data), "--pde"], settings, capsys)
        assert code == EXIT_VERIFY
        assert json.loads(out)["passed"] is False

    @pytest.mark.slow
    def test_mc_straddle(self, write_spec, straddle_spec_dict, settings, capsys):
        data = dict(straddle_spec_dict, chart="radius", options={"dt": 0.0025})
        code, out, _ = _run(["verify", write_spec(data), "--mc", "--paths", "4000", "--seed", "7"], settings, capsys)
        assert code == EXIT_OK
        assert json.loads(out)["mc"]["passed"] is True


class TestSweep:
    def test_kappa_sweep_csv(self, write_spec, straddle_spec_dict, settings, capsys):
        data = dict(straddle_spec_dict, payoff={"kind": "Straddle", "K": 0.5})
        code, out, _ = _run(
            ["sweep", write_spec(data), "--param", "kappa", "--values", "0,0.01,0.02"], settings, capsys,
        )
        assert code == EXIT_OK
        table = pd.read_csv(io.StringIO(out))
        assert list(table["kappa"]) == [0.0, 0.01, 0.02]
        assert table["monotone"].all()

    def test_sweep_json(self, write_spec, straddle_spec_dict, settings, capsys):
        code, out, _ = _run(
            ["sweep", write_spec(straddle_spec_dict), "--param", "K", "--values", "1.0,2.0,2.5",
             "--format", "json"],
            settings, capsys,
        )
        assert code == EXIT_OK
        rows = json.loads(out)["sweep"]["rows"]
        assert [r["regime"] for r in rows] == ["SingleUpperBoundary", "SingleUpperBoundary", "TwoBoundary"]
