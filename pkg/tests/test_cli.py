import json
from dataclasses import replace

import numpy as np
import pytest

from dampedwave import scenarios as sc
from dampedwave.cli import main
from dampedwave.trace import TRACE_COLUMNS, read_trace_csv, write_trace_csv

TINY_SCENARIO = """\
name = "tiny"
domain_mode = "half-line"

[profile]
kind = "pure-critical"
amplitude = 6.0
l2 = 1.0

[data]
shape = "bump"
amplitude = 1.0
support_radius = 2.0

[solver]
dx = 0.1
cfl = 0.9
t_final = 30.0

[multipliers]
source = "paper-defaults"

[fit]
window = [5.0, 30.0]
bound_exponent = 2.0
"""


@pytest.fixture()
def tiny_config(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY_SCENARIO)
    return path


class TestScenarioParsing:
    def test_catalog_loads(self):
        names = sc.catalog_names()
        assert "theorem-1-1" in names
        for name in names:
            scenario = sc.load_catalog_scenario(name)
            assert scenario.name == name

    def test_unknown_catalog_name(self):
        with pytest.raises(sc.ScenarioError, match="unknown catalog"):
            sc.load_catalog_scenario("no-such-scenario")

    def test_missing_file_is_config_error(self, tmp_path):
        with pytest.raises(sc.ScenarioError):
            sc.load_scenario(tmp_path / "absent.toml")

    def test_bad_shape_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(TINY_SCENARIO.replace('shape = "bump"', 'shape = "wedge"'))
        with pytest.raises(sc.ScenarioError, match="shape"):
            sc.load_scenario(path)

    def test_explicit_source_needs_params(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(
            TINY_SCENARIO.replace('source = "paper-defaults"', 'source = "explicit"')
        )
        with pytest.raises(sc.ScenarioError):
            sc.load_scenario(path)

    def test_auto_record_stride(self, tiny_config):
        scenario = sc.load_scenario(tiny_config)
        config = scenario.solver_config()
        assert config.record_stride >= 1


class TestRunScenario:
    def test_outputs_written_and_valid(self, tiny_config, tmp_path):
        scenario = sc.load_scenario(tiny_config)
        out = tmp_path / "out"
        result = sc.run_scenario(scenario, out_dir=out)
        assert result.exit_code == 0
        assert result.trace_path.exists()
        assert result.summary_path.exists()
        summary = json.loads(result.summary_path.read_text())
        sc.validate_summary(summary)
        header, rows = read_trace_csv(result.trace_path)
        assert header == TRACE_COLUMNS
        assert rows.shape[0] == summary["grid"]["samples"]

    def test_budget_rhs_constant_column(self, tiny_config):
        scenario = sc.load_scenario(tiny_config)
        result = sc.run_scenario(scenario)
        rhs = result.trace.column("weighted_budget_rhs")
        assert np.all(rhs == rhs[0])

    def test_deterministic_bytes(self, tiny_config, tmp_path):
        scenario = sc.load_scenario(tiny_config)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        r1 = sc.run_scenario(scenario, out_dir=out1)
        r2 = sc.run_scenario(scenario, out_dir=out2)
        assert r1.trace_path.read_bytes() == r2.trace_path.read_bytes()
        assert r1.summary_path.read_bytes() == r2.summary_path.read_bytes()

    def test_structural_validation_refuses_constant_profile(self, tmp_path):
        path = tmp_path / "bad.toml"
        text = TINY_SCENARIO.replace(
            'kind = "pure-critical"\namplitude = 6.0\nl2 = 1.0',
            'kind = "constant"\namplitude = 6.0',
        )
        path.write_text(text)
        with pytest.raises(sc.ScenarioError, match="structural"):
            sc.run_scenario(sc.load_scenario(path))


class TestConvergence:
    def test_observed_order(self, tiny_config):
        scenario = sc.load_scenario(tiny_config)
        short = replace(scenario, t_final=2.0, dx=0.08)
        table = sc.convergence_study(short, levels=4)
        assert table[-1].error is None
        orders = [lvl.observed_order for lvl in table if lvl.observed_order is not None]
        assert orders, "no observed orders computed"
        assert orders[-1] == pytest.approx(2.0, abs=0.4)

    def test_needs_three_levels(self, tiny_config):
        with pytest.raises(sc.ScenarioError):
            sc.convergence_study(sc.load_scenario(tiny_config), levels=2)


class TestSweep:
    def test_values_and_failures_recorded(self, tiny_config, tmp_path):
        scenario = sc.load_scenario(tiny_config)
        rows = sc.sweep(scenario, "V0", [6.0, -1.0], out_dir=tmp_path)
        assert len(rows) == 2
        assert rows[0]["status"] in ("ok", "check-failed")
        assert rows[1]["status"].startswith("error")
        assert np.isnan(rows[1]["alpha"])
        assert (tmp_path / "tiny.sweep.csv").exists()

    def test_unknown_parameter(self, tiny_config):
        with pytest.raises(sc.ScenarioError):
            sc.sweep(sc.load_scenario(tiny_config), "bogus", [1.0])

    def test_empty_values(self, tiny_config):
        assert sc.sweep(sc.load_scenario(tiny_config), "V0", []) == []


class TestTraceCsv:
    def test_round_trip(self, tmp_path):
        rows = np.arange(30, dtype=float).reshape(3, 10)
        rows[1, 3] = 1.0 / 3.0
        path = tmp_path / "t.csv"
        write_trace_csv(path, TRACE_COLUMNS, rows)
        header, back = read_trace_csv(path)
        assert header == TRACE_COLUMNS
        np.testing.assert_array_equal(back, rows)

    def test_wrong_columns_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_trace_csv(tmp_path / "t.csv", ["t", "E"], np.zeros((1, 2)))

    def test_wrong_header_on_read(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_trace_csv(path)


class TestCliExitCodes:
    def test_run_ok(self, tiny_config, tmp_path, capsys):
        code = main(["run", "--config", str(tiny_config), "--out", str(tmp_path / "o")])
        assert code == 0
        out = capsys.readouterr().out
        assert "trace:" in out and "summary:" in out

    def test_quiet_suppresses_output(self, tiny_config, tmp_path, capsys):
        main(["run", "--config", str(tiny_config), "--out", str(tmp_path / "o"), "--quiet"])
        assert capsys.readouterr().out == ""

    def test_missing_config_is_exit_2(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.toml")])
        assert code == 2

    def test_malformed_toml_is_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text("name = [unclosed")
        assert main(["run", "--config", str(path)]) == 2

    def test_no_source_is_exit_2(self, capsys):
        assert main(["run", "--out", "unused"]) == 2

    def test_fit_subcommand(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "o"
        main(["run", "--config", str(tiny_config), "--out", str(out), "--quiet"])
        code = main(["fit", str(out / "tiny.trace.csv"), "--window-lo", "5"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert "alpha" in payload

    def test_check_multipliers(self, tiny_config, tmp_path, capsys):
        grid = tmp_path / "grid.csv"
        code = main([
            "check-multipliers", "--config", str(tiny_config), "--dump-grid", str(grid)
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "feasible: True" in out
        header = grid.read_text().splitlines()[0]
        assert header == "t,x,cond_iii,cond_iv"

    def test_validate_profile(self, tiny_config, capsys):
        assert main(["validate-profile", "--config", str(tiny_config)]) == 0
        assert "structural: pass" in capsys.readouterr().out

    def test_converge_writes_json(self, tmp_path, capsys):
        path = tmp_path / "tiny.toml"
        path.write_text(TINY_SCENARIO.replace("t_final = 30.0", "t_final = 2.0"))
        out = tmp_path / "o"
        code = main(["converge", "--config", str(path), "--levels", "3",
                     "--out", str(out), "--quiet"])
        assert code == 0
        payload = json.loads((out / "tiny.convergence.json").read_text())
        assert len(payload) == 3

    def test_sweep_cli(self, tiny_config, tmp_path, capsys):
        code = main([
            "sweep", "--config", str(tiny_config), "--parameter", "V0",
            "--values", "5.0,6.0", "--out", str(tmp_path / "o"), "--quiet",
        ])
        assert code == 0
