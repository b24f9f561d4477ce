"""Golden-output and exit-code tests for the command-line front end."""
import json
import subprocess
import sys

import pytest

from procurelab.cli import RunConfig, main
from procurelab.game_core import critical_p


def run_cli(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage failures
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(argv, capsys):
    code, out, err = run_cli(argv, capsys)
    assert code in (0, 1), err
    return code, json.loads(out)


class TestRunConfig:
    def test_defaults(self):
        rc = RunConfig()
        assert (rc.A, rc.B, rc.E) == (0.0, 1.5, 1.0)
        assert rc.seed == 42 and rc.tol == 1e-6
        assert rc.format == "csv"

    def test_config_file_applies_and_flags_win(self, capsys, tmp_path):
        path = tmp_path / "rc.json"
        path.write_text(json.dumps({"p": 0.3, "seed": 7}))
        _, d = run_json(["regimes", "--config", str(path)], capsys)
        assert d["p"] == 0.3 and d["run_config"]["seed"] == 7
        _, d = run_json(["regimes", "--config", str(path), "--p", "0.45"], capsys)
        assert d["p"] == 0.45

    def test_unknown_config_field_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "rc.json"
        path.write_text('{"bogus": 1}')
        code, _, err = run_cli(["regimes", "--config", str(path)], capsys)
        assert code == 2 and "bogus" in err

    def test_malformed_config_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "rc.json"
        path.write_text("not json")
        assert run_cli(["regimes", "--config", str(path)], capsys)[0] == 2

    def test_invalid_market_is_usage_error(self, capsys):
        assert run_cli(["regimes", "--A", "2", "--B", "1"], capsys)[0] == 2

    def test_output_flag_writes_file(self, capsys, tmp_path):
        path = tmp_path / "out.json"
        code, out, _ = run_cli(["regimes", "--p", "0.1", "--output", str(path)], capsys)
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["regime"] == "LowP"

    def test_every_output_echoes_run_config(self, capsys):
        _, d = run_json(["cutpoints3", "--y", "0.9", "--z", "0.8", "--seed", "9"], capsys)
        echo = d["run_config"]
        assert set(echo) == {"A", "B", "E", "p", "n", "samples", "seed", "tol",
                             "output", "format"}
        assert echo["seed"] == 9


class TestValueCurve:
    def test_symmetric_row_golden(self, capsys):
        code, out, _ = run_cli(["value-curve", "--p-min", "0.5", "--p-max", "0.5"], capsys)
        lines = out.splitlines()
        assert code == 0
        assert lines[0].startswith("# run_config: {")
        assert lines[1] == "p,v_formula,regime,m,epsilon_p"
        assert lines[2] == "0.5,0.5,Symmetric,,0"

    def test_near_critical_input_snaps(self, capsys):
        code, out, _ = run_cli(
            ["value-curve", "--p-min", "0.232408", "--p-max", "0.232408"], capsys)
        row = out.splitlines()[2].split(",")
        assert code == 0
        assert row[2] == "Critical"
        assert abs(float(row[0]) - critical_p()) < 1e-9
        assert abs(float(row[1]) - 1.0 / 3.0) < 1e-9

    def test_low_p_row_reports_m(self, capsys):
        _, out, _ = run_cli(["value-curve", "--p-min", "0.1", "--p-max", "0.1"], capsys)
        assert out.splitlines()[2].split(",")[2:4] == ["LowP", "2"]

    def test_ladder_columns(self, capsys):
        code, out, _ = run_cli(
            ["value-curve", "--p-min", "0.5", "--p-max", "0.5", "--n-ladder", "51,101"],
            capsys)
        lines = out.splitlines()
        assert code == 0
        assert lines[1] == "p,v_formula,regime,m,epsilon_p,value_n51,value_n101"
        cells = lines[2].split(",")
        assert abs(float(cells[5]) - 0.5) < 1e-9
        assert abs(float(cells[6]) - 0.5) < 1e-9

    def test_steps_sweep(self, capsys):
        code, out, _ = run_cli(
            ["value-curve", "--p-min", "0.3", "--p-max", "0.4", "--steps", "3"], capsys)
        lines = out.splitlines()
        assert code == 0 and len(lines) == 5
        assert [row.split(",")[0] for row in lines[2:]] == ["0.3", "0.35", "0.4"]

    def test_json_format(self, capsys):
        _, d = run_json(
            ["value-curve", "--p-min", "0.3", "--p-max", "0.3", "--format", "json"],
            capsys)
        assert d["rows"][0]["v_formula"] == pytest.approx(0.376991849031, abs=1e-9)
        assert d["rows"][0]["m"] is None

    def test_bad_ranges_are_usage_errors(self, capsys):
        assert run_cli(["value-curve", "--p-min", "0.6", "--p-max", "0.7"], capsys)[0] == 2
        assert run_cli(["value-curve", "--p-min", "0.4", "--p-max", "0.3"], capsys)[0] == 2
        assert run_cli(["value-curve", "--p-min", "0", "--p-max", "0.3"], capsys)[0] == 2
        assert run_cli(["value-curve", "--p-min", "0.3", "--p-max", "0.4",
                        "--steps", "0"], capsys)[0] == 2
        assert run_cli(["value-curve", "--p-min", "0.3", "--p-max", "0.4",
                        "--n-ladder", "51,x"], capsys)[0] == 2

    def test_deterministic(self, capsys):
        argv = ["value-curve", "--p-min", "0.25", "--p-max", "0.45", "--steps", "5"]
        first = run_cli(argv, capsys)
        second = run_cli(argv, capsys)
        assert first == second


class TestVerify:
    def test_log_passes(self, capsys):
        code, d = run_json(["verify", "--strategy", "log"], capsys)
        assert code == 0 and d["pass"] is True
        assert [r["check"] for r in d["reports"]] == [
            "normalization", "payoff-inequalities", "functional-residuals", "joint-value"]
        assert all(r["pass"] for r in d["reports"])
        assert d["reports"][1]["max_violation"] <= 1e-6

    def test_uniform_and_critical_pass(self, capsys):
        for name in ("uniform", "critical"):
            code, d = run_json(["verify", "--strategy", name], capsys)
            assert code == 0 and d["pass"] is True
            assert [r["check"] for r in d["reports"]] == [
                "normalization", "payoff-inequalities", "joint-value"]

    def test_weighted_passes_at_p03(self, capsys):
        code, d = run_json(["verify", "--strategy", "weighted", "--p", "0.3"], capsys)
        assert code == 0 and d["pass"] is True
        assert d["p"] == 0.3
        assert len(d["reports"]) == 4

    def test_incompatible_p_is_usage_error(self, capsys):
        assert run_cli(["verify", "--strategy", "weighted", "--p", "0.7"], capsys)[0] == 2
        assert run_cli(["verify", "--strategy", "weighted", "--p", "0.1"], capsys)[0] == 2
        assert run_cli(["verify", "--strategy", "log", "--p", "0.3"], capsys)[0] == 2

    def test_unknown_strategy_is_usage_error(self, capsys):
        assert run_cli(["verify", "--strategy", "bogus"], capsys)[0] == 2


class TestSolveGrid:
    def test_symmetric_value(self, capsys):
        code, d = run_json(["solve-grid", "--p", "0.5", "--n", "51"], capsys)
        assert code == 0
        assert abs(d["value"] - 0.5) <= 1e-6
        assert d["converged"] is True
        assert d["v_formula"] == 0.5
        assert d["grid_n"] >= 51 and d["requested_n"] == 51

    def test_weighted_value_anchor(self, capsys):
        _, d = run_json(["solve-grid", "--p", "0.3", "--n", "101"], capsys)
        # frozen from the breakpoint-enriched 101-point grid
        assert d["value"] == pytest.approx(0.372519372552, abs=1e-6)
        assert d["exploitability"] <= 1e-6


class TestCutpoints3:
    def test_anchor(self, capsys):
        _, d = run_json(["cutpoints3", "--y", "0.9", "--z", "0.8"], capsys)
        assert (d["t"], d["p_y"], d["p_z"]) == (0.94, 0.7, 0.1)
        assert d["cell"] == "O1" and d["mirrored"] is True
        assert set(d["jump_signs"]) == {"y", "z", "t", "p_y", "p_z"}

    def test_boundary_pair_has_no_cell(self, capsys):
        _, d = run_json(["cutpoints3", "--y", "0.8", "--z", "0.8"], capsys)
        assert d["cell"] is None
        assert d["t"] == pytest.approx((1.6 + 3.0) / 5.0, abs=1e-12)

    def test_out_of_range_bid_fails(self, capsys):
        code, _, err = run_cli(["cutpoints3", "--y", "9", "--z", "0.8"], capsys)
        assert code == 1 and err


class TestRegimes:
    def test_low_p_anchor(self, capsys):
        _, d = run_json(["regimes", "--p", "0.1"], capsys)
        assert d["regime"] == "LowP" and d["m"] == 2
        assert d["benchmark"] == 0.25

    def test_symmetric(self, capsys):
        _, d = run_json(["regimes", "--p", "0.5"], capsys)
        assert d["regime"] == "Symmetric" and d["v"] == 0.5

    def test_snap_to_critical(self, capsys):
        _, d = run_json(["regimes", "--p", "0.232409"], capsys)
        assert d["regime"] == "Critical"

    def test_out_of_range_is_usage_error(self, capsys):
        assert run_cli(["regimes", "--p", "0.7"], capsys)[0] == 2


class TestSimulate:
    def test_log_pair(self, capsys):
        code, d = run_json(
            ["simulate", "--row", "log", "--col", "log", "--samples", "20000"], capsys)
        assert code == 0
        assert abs(d["means"][0] + d["means"][1] - 1.0) < 1e-12
        assert abs(d["means"][0] - 0.5) <= 4.0 * d["stderrs"][0]

    def test_seed_controls_draws(self, capsys):
        argv = ["simulate", "--row", "log", "--col", "uniform", "--samples", "5000"]
        first = run_cli(argv, capsys)
        second = run_cli(argv, capsys)
        other = run_cli(argv + ["--seed", "43"], capsys)
        assert first == second
        assert first[1] != other[1]

    def test_weighted_needs_valid_p(self, capsys):
        code, _, _ = run_cli(
            ["simulate", "--row", "weighted", "--col", "log", "--p", "0.7"], capsys)
        assert code == 2


class TestScansAndProbes:
    def test_pure_ne_scan_two_player(self, capsys):
        code, d = run_json(["pure-ne-scan", "--N", "2", "--n", "51"], capsys)
        assert code == 0
        assert d["count"] == 0 and d["found"] == []
        assert (d["sup_inf"], d["inf_sup"]) == (0.0, 1.0)

    def test_pure_ne_scan_three_player(self, capsys):
        _, d = run_json(["pure-ne-scan", "--N", "3", "--n", "15"], capsys)
        assert d["count"] == 0
        assert "sup_inf" not in d

    def test_ddpm_probe_passes(self, capsys):
        code, d = run_json(["ddpm-probe", "--samples", "200"], capsys)
        assert code == 0 and d["pass"] is True
        assert d["check"] == "ddpm-one-sided-limits"
        assert d["max_violation"] == 0.0

    def test_br_dynamics_never_settles(self, capsys):
        code, d = run_json(["br-dynamics", "--steps", "500"], capsys)
        assert code == 0
        assert d["fixed_point_step"] is None
        assert d["min_winner_payoff"] == 1.0


class TestRegionGrid:
    def test_csv_golden(self, capsys):
        code, out, _ = run_cli(
            ["region-grid", "--kind", "WeightedP", "--p", "0.1", "--resolution", "4"],
            capsys)
        lines = out.splitlines()
        assert code == 0
        assert lines[0].startswith("# run_config: {")
        assert lines[1] == "kind=WeightedP,p=0.1,resolution=4,A=0,B=1.5,E=1"
        assert len(lines) == 6
        assert lines[2].split(",")[0] == "0.1"

    def test_two_player_json(self, capsys):
        _, d = run_json(
            ["region-grid", "--kind", "TwoPlayer", "--resolution", "4",
             "--format", "json"], capsys)
        assert len(d["matrix"]) == 4
        assert [d["matrix"][i][i] for i in range(4)] == [0.5] * 4

    def test_slice_needs_x(self, capsys):
        assert run_cli(["region-grid", "--kind", "ThreePlayerSlice"], capsys)[0] == 2
        assert run_cli(["region-grid", "--kind", "TwoPlayer", "--x", "1.0"],
                       capsys)[0] == 2

    def test_resolution_cap_fails_cleanly(self, capsys):
        code, _, err = run_cli(
            ["region-grid", "--kind", "TwoPlayer", "--resolution", "5000"], capsys)
        assert code == 1 and "4096" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "procurelab.cli", "regimes", "--p", "0.1"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["m"] == 2
