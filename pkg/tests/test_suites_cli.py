import json

import pytest

from src.hecke import cli
from src.hecke.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_REGIME, RunConfig, main
from src.hecke.core.errors import InputError, NonUnitError, VerificationError
from src.hecke.infrastructure.monitoring import metrics_collector
from src.hecke.verification.suites import SUITE_NAMES, SuiteReport, SuiteRunner, run_suites


def _element(coweight, coeff=1):
    return {"support": [{"coweight": [coweight], "class": [{"x_indices": [], "y_exponents": [0], "coeff": coeff}]}]}


class TestSuiteReport:
    """Test report bookkeeping"""

    def test_record(self):
        """Failures keep their witness"""
        report = SuiteReport("demo")
        report.record("ok", True)
        report.record("bad", False, {"value": 3})
        assert not report.passed
        assert report.to_dict()["witnesses"] == [{"check": "bad", "value": 3}]


class TestSuiteRunner:
    """Test suite selection and configuration"""

    def test_default_config_fallback(self, tmp_path):
        """A missing configuration file falls back to defaults"""
        runner = SuiteRunner(str(tmp_path / "missing.json"))
        assert runner.params("torus")["p"] == 3

    def test_config_file_overrides_defaults(self, tmp_path):
        """Suite parameters from the file replace defaults key by key"""
        path = tmp_path / "suites.json"
        path.write_text(json.dumps({"suites": {"presentation": {"bounds": [1]}}}))
        runner = SuiteRunner(str(path))
        params = runner.params("presentation")
        assert params["bounds"] == [1]
        assert params["group"] == "PGL2"

    def test_unknown_suite(self, tmp_path):
        """Unknown suite names raise"""
        with pytest.raises(InputError):
            SuiteRunner(str(tmp_path / "missing.json")).run("nope")

    def test_presentation_suite(self, tmp_path):
        """The presentation suite passes with the support override"""
        reports = run_suites(["presentation"], str(tmp_path / "missing.json"), {"support": 3})
        assert len(reports) == 1
        assert reports[0].passed
        assert reports[0].details == {"3": [4, 3, 3]}

    def test_torus_suite(self, tmp_path):
        """The torus suite passes at precision 2"""
        report = SuiteRunner(str(tmp_path / "missing.json"), {"precision": 2}).run("torus")
        assert report.passed
        assert report.details["ranks delta=3"] == [1, 3, 3, 1]

    def test_splitness_suite(self, tmp_path):
        """Splitness holds at the default regimes"""
        report = SuiteRunner(str(tmp_path / "missing.json"), {"depth": 1}).run("splitness")
        assert report.passed
        assert report.checks_passed == 2

    def test_iwahori_suite(self, tmp_path):
        """The Iwahori suite passes and skips Theta at chi = 1"""
        report = SuiteRunner(str(tmp_path / "missing.json")).run("iwahori")
        assert report.passed
        assert report.details["theta [1]"].startswith("not applicable")

    def test_cohomology_suite_checks_reduction(self, tmp_path):
        """Z/9 coefficients add the coefficient-change check"""
        path = tmp_path / "suites.json"
        path.write_text(json.dumps({"suites": {"cohomology": {"groups": [{"orders": [9], "max_degree": 2}]}}}))
        report = SuiteRunner(str(path)).run("cohomology")
        assert report.passed
        assert report.details["coeff_change [9] Z/9"] == {"0": True, "1": True, "2": True}

    def test_metrics_are_recorded(self, tmp_path):
        """Running a suite counts a check and a suite result"""
        metrics_collector.reset()
        run_suites(["presentation"], str(tmp_path / "missing.json"), {"support": 1})
        summary = metrics_collector.get_summary()
        assert summary["checks_by_name"] == {"presentation": 1}
        assert summary["suite_checks_passed"] == 1


class TestRunConfig:
    """Test CLI parameter validation"""

    def test_defaults(self):
        """Defaults describe PGL2 over F_7 with S = Z/3"""
        config = RunConfig()
        assert (config.group, config.q, config.ell, config.r) == ("PGL2", 7, 3, 1)

    @pytest.mark.parametrize("field,value", [("q", 1000), ("depth", 9), ("r", 0), ("support", -1)])
    def test_out_of_range(self, field, value):
        """Out-of-range parameters are rejected"""
        with pytest.raises(ValueError):
            RunConfig(**{field: value})

    def test_suites_validated(self):
        """Suite names are checked against the known suites"""
        assert RunConfig(suite=["all"]).suite == ["all"]
        assert RunConfig(suite=SUITE_NAMES[:2]).suite == SUITE_NAMES[:2]
        with pytest.raises(ValueError):
            RunConfig(suite=["nope"])


class TestCommandLine:
    """Test the command-line entry point"""

    def test_presentation(self, capsys):
        """satake presentation prints dims per degree"""
        code = main(["satake", "presentation", "--support", "3", "--max-degree", "2"])
        payload = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert payload["dims"] == {"0": 4, "1": 3, "2": 3}
        assert payload["group"] == "PGL2"

    def test_multiply(self, tmp_path, capsys):
        """delta_1 * delta_-1 = delta_0, which is spherical"""
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        a.write_text(json.dumps(_element(1)))
        b.write_text(json.dumps(_element(-1, 2)))
        code = main(["satake", "multiply", str(a), str(b)])
        payload = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert payload["spherical"]
        assert payload["product"] == _element(0, 2)

    def test_multiply_to_file(self, tmp_path):
        """--out writes the report to a file"""
        a, out = tmp_path / "a.json", tmp_path / "out.json"
        a.write_text(json.dumps(_element(1)))
        assert main(["satake", "multiply", str(a), str(a), "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["product"] == _element(2)

    def test_bad_json(self, tmp_path, capsys):
        """Broken element files exit with the input code"""
        a = tmp_path / "a.json"
        a.write_text("{\"support\": ")
        assert main(["satake", "multiply", str(a), str(a)]) == EXIT_INPUT
        assert json.loads(capsys.readouterr().out)["error"] == "input"

    def test_support_not_a_list(self, tmp_path, capsys):
        """A non-list support is an input error, not a crash"""
        bad, good = tmp_path / "bad.json", tmp_path / "good.json"
        bad.write_text(json.dumps({"support": 5}))
        good.write_text(json.dumps(_element(1)))
        code = main(["satake", "multiply", str(bad), str(good), "--q", "7", "--ell", "3", "--r", "1"])
        assert code == EXIT_INPUT
        assert json.loads(capsys.readouterr().out)["error"] == "input"

    def test_class_above_degree_cap(self, tmp_path, capsys):
        """y^3 has degree 6, above the cap 4 of the ring"""
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        a.write_text(json.dumps({"support": [{"coweight": [1], "class": [
            {"x_indices": [], "y_exponents": [3], "coeff": 1}]}]}))
        b.write_text(json.dumps(_element(1)))
        assert main(["satake", "multiply", str(a), str(b)]) == EXIT_INPUT
        assert json.loads(capsys.readouterr().out)["error"] == "input"

    @pytest.mark.parametrize("error,code", [
        (NonUnitError("3 is not a unit mod 9"), EXIT_INPUT),
        (VerificationError("inconsistent lift"), EXIT_FAILED),
    ])
    def test_library_errors_map_to_exit_codes(self, monkeypatch, capsys, error, code):
        """Non-unit and verification errors leave through their exit codes"""
        def fail(config):
            raise error
        monkeypatch.setattr(cli, "cmd_satake_presentation", fail)
        assert main(["satake", "presentation"]) == code
        capsys.readouterr()

    def test_regime_violation(self, capsys):
        """9 does not divide q - 1 = 6"""
        assert main(["satake", "presentation", "--r", "2"]) == EXIT_REGIME
        assert json.loads(capsys.readouterr().out)["error"] == "regime"

    def test_invalid_flag_value(self, capsys):
        """pydantic validation failures exit with the input code"""
        assert main(["satake", "presentation", "--q", "1000"]) == EXIT_INPUT

    def test_verify(self, tmp_path, capsys):
        """verify runs the selected suite and exits 0 when it passes"""
        code = main(["verify", "--suite", "presentation", "--support", "2",
                     "--config", str(tmp_path / "missing.json")])
        payload = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert payload["passed"]
        assert [r["suite"] for r in payload["reports"]] == ["presentation"]
