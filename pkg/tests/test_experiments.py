"""Tests for the experiment drivers and the verification battery."""
import json
import math

import numpy as np
import pytest

from procurelab.equilibria import (
    log_equilibrium,
    uniform_equilibrium,
    value_weighted,
    weighted_equilibrium,
)
from procurelab.experiments import (
    DynamicsTrajectory,
    RegionKind,
    TournamentResult,
    VerificationReport,
    battery_passed,
    br_dynamics,
    make_report,
    mc_tournament,
    region_grid,
    region_grid_csv,
    run_battery,
    write_reports,
)
from procurelab.game_core import (
    DomainError,
    MarketConfig,
    UnsupportedError,
    WeightedKernel,
    default_config,
    symmetric_kernel,
)
from procurelab.strategy import point_mass

CFG = default_config()

BATTERY_CHECKS = [
    "payoff-conservation",
    "combinatorial-agreement",
    "three-player-agreement",
    "deviation-optimality",
    "cutpoint-relations",
    "ordering-cells-exhaustive",
    "jump-sign-scan",
    "map-roundtrips",
    "strategy-normalization",
    "equilibrium-inequalities",
    "curve-quadrature-agreement",
    "functional-residuals",
    "value-at-half",
    "value-at-critical",
    "critical-map-identity",
    "joint-value-consistency",
    "mc-consistency",
    "matrix-constant-sum",
    "solver-certificate-recompute",
    "projection-gap-ladder",
    "pure-ne-scan",
    "br-dynamics-no-fixed-point",
    "value-ladder-desk",
    "ddpm-one-sided-limits",
]


@pytest.fixture(scope="module")
def battery():
    return run_battery(seed=42)


class TestReport:
    def test_make_report_sets_pass_flag(self):
        assert make_report("c", {}, 1e-13, 1e-12).passed
        assert not make_report("c", {}, 1e-11, 1e-12).passed
        # boundary counts as passing
        assert make_report("c", {}, 1e-12, 1e-12).passed

    def test_inconsistent_flag_rejected(self):
        with pytest.raises(ValueError):
            VerificationReport("c", {}, 1.0, 1e-12, True)
        with pytest.raises(ValueError):
            VerificationReport("c", {}, 0.0, 1e-12, False)

    def test_nan_violation_fails(self):
        assert not make_report("c", {}, math.nan, 1e-12).passed
        with pytest.raises(ValueError):
            VerificationReport("c", {}, math.nan, 1e-12, True)

    def test_json_shape(self):
        r = make_report("c", {"n": 3}, 0.5, 1.0, worst=((1, 2),), runtime_s=0.25)
        payload = json.loads(r.to_json())
        assert payload["check"] == "c"
        assert payload["parameters"] == {"n": 3}
        assert payload["max_violation"] == 0.5
        assert payload["tolerance"] == 1.0
        assert payload["pass"] is True
        # wall time varies between runs and must not leak into the payload
        assert "runtime_s" not in payload
        assert "runtime" not in r.to_json()

    def test_write_reports_one_line_each(self, tmp_path):
        reports = [make_report("a", {}, 0.0, 1.0), make_report("b", {}, 2.0, 1.0)]
        path = tmp_path / "reports.jsonl"
        write_reports(reports, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert [json.loads(l)["check"] for l in lines] == ["a", "b"]
        assert [json.loads(l)["pass"] for l in lines] == [True, False]


class TestTournament:
    def test_shared_atom_splits_exactly(self):
        pe = point_mass(CFG.E, CFG)
        res = mc_tournament([pe, pe], symmetric_kernel(CFG), 500, 7)
        assert res.means == (0.5, 0.5)
        assert res.stderrs == (0.0, 0.0)
        assert res.samples == 500 and res.seed == 7

    def test_column_is_exact_complement(self):
        s = log_equilibrium(CFG)
        res = mc_tournament([s, uniform_equilibrium(CFG)], symmetric_kernel(CFG), 2_000, 3)
        assert abs(res.means[0] + res.means[1] - 1.0) < 1e-12
        assert res.stderrs[0] == res.stderrs[1]

    def test_log_pair_brackets_half(self):
        s = log_equilibrium(CFG)
        res = mc_tournament([s, s], symmetric_kernel(CFG), 100_000, 42)
        assert abs(res.means[0] - 0.5) <= 4.0 * res.stderrs[0]
        assert 1e-4 < res.stderrs[0] < 1e-2

    def test_weighted_pair_brackets_value(self):
        w = weighted_equilibrium(0.3, CFG)
        res = mc_tournament([w, w], WeightedKernel(p=0.3, cfg=CFG), 100_000, 42)
        assert abs(res.means[0] - value_weighted(0.3).v) <= 4.0 * res.stderrs[0]

    def test_three_player_mode(self):
        pe = point_mass(CFG.E, CFG)
        res = mc_tournament([pe, pe, pe], None, 300, 11)
        assert len(res.means) == 3
        for m, se in zip(res.means, res.stderrs):
            assert abs(m - 1.0 / 3.0) < 1e-15
            assert se < 1e-15

    def test_deterministic_and_seed_sensitive(self):
        s = log_equilibrium(CFG)
        kern = symmetric_kernel(CFG)
        a = mc_tournament([s, s], kern, 5_000, 42)
        b = mc_tournament([s, s], kern, 5_000, 42)
        c = mc_tournament([s, s], kern, 5_000, 43)
        assert a == b
        assert a.means != c.means

    def test_validation(self):
        s = log_equilibrium(CFG)
        with pytest.raises(DomainError):
            mc_tournament([s, s], symmetric_kernel(CFG), 1, 0)
        with pytest.raises(DomainError):
            mc_tournament([s, s, s], symmetric_kernel(CFG), 10, 0)
        with pytest.raises(DomainError):
            mc_tournament([s], None, 10, 0)


class TestDynamics:
    def test_no_fixed_point_from_floor(self):
        traj = br_dynamics((CFG.A, CFG.A), 10_000, CFG)
        assert traj.fixed_point_step is None
        assert traj.min_winner_payoff == 1.0
        assert len(traj.profiles) == 10_001
        assert traj.profiles[0] == (CFG.A, CFG.A)

    def test_three_player_cycle(self):
        traj = br_dynamics((CFG.A, 0.75, CFG.B), 10_000, CFG)
        assert traj.fixed_point_step is None
        assert traj.min_winner_payoff == 1.0

    def test_deterministic(self):
        a = br_dynamics((0.2, 1.1), 500, CFG)
        b = br_dynamics((0.2, 1.1), 500, CFG)
        assert a == b

    def test_moves_stay_in_range(self):
        traj = br_dynamics((CFG.B, CFG.B), 200, CFG)
        arr = np.array(traj.profiles)
        assert arr.min() >= CFG.A and arr.max() <= CFG.B

    def test_validation(self):
        with pytest.raises(DomainError):
            br_dynamics((0.5,), 10, CFG)
        with pytest.raises(DomainError):
            br_dynamics((0.5, 0.5), 0, CFG)
        with pytest.raises(DomainError):
            br_dynamics((CFG.A - 1.0, 0.5), 10, CFG)


class TestRegionGrid:
    def test_two_player_plane(self):
        M = region_grid(RegionKind.TWO_PLAYER, 512, CFG)
        assert M.shape == (512, 512)
        assert np.all(np.diag(M) == 0.5)
        assert np.array_equal(M + M.T, np.ones_like(M))

    def test_weighted_plane_diagonal_is_p(self):
        M = region_grid(RegionKind.WEIGHTED_P, 64, CFG, p=0.1)
        assert np.all(np.diag(M) == 0.1)

    def test_three_player_slice_depends_on_own_bid(self):
        at_e = region_grid(RegionKind.THREE_PLAYER_SLICE, 64, CFG, x=CFG.E)
        at_a = region_grid(RegionKind.THREE_PLAYER_SLICE, 64, CFG, x=CFG.A)
        assert at_e.shape == (64, 64)
        assert (at_e != at_a).mean() > 0.1

    def test_resolution_caps(self):
        with pytest.raises(UnsupportedError):
            region_grid(RegionKind.TWO_PLAYER, 4097, CFG)
        with pytest.raises(DomainError):
            region_grid(RegionKind.TWO_PLAYER, 1, CFG)

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            region_grid(RegionKind.TWO_PLAYER, 8, CFG, p=0.3)
        with pytest.raises(DomainError):
            region_grid(RegionKind.WEIGHTED_P, 8, CFG)
        with pytest.raises(DomainError):
            region_grid(RegionKind.WEIGHTED_P, 8, CFG, p=0.3, x=0.5)
        with pytest.raises(DomainError):
            region_grid(RegionKind.THREE_PLAYER_SLICE, 8, CFG)
        with pytest.raises(DomainError):
            region_grid(RegionKind.THREE_PLAYER_SLICE, 8, CFG, x=0.5, p=0.3)

    def test_csv_header_and_shape(self):
        M = region_grid(RegionKind.TWO_PLAYER, 8, CFG)
        text = region_grid_csv(M, RegionKind.TWO_PLAYER, 8, CFG)
        lines = text.splitlines()
        assert lines[0] == "kind=TwoPlayer,resolution=8,A=0,B=1.5,E=1"
        assert len(lines) == 9
        assert text.endswith("\n")
        parsed = np.array([[float(v) for v in row.split(",")] for row in lines[1:]])
        assert np.allclose(parsed, M, atol=1e-12)

    def test_csv_header_carries_slice_parameters(self):
        Mw = region_grid(RegionKind.WEIGHTED_P, 4, CFG, p=0.1)
        assert region_grid_csv(Mw, RegionKind.WEIGHTED_P, 4, CFG, p=0.1).splitlines()[0] == (
            "kind=WeightedP,p=0.1,resolution=4,A=0,B=1.5,E=1"
        )
        M3 = region_grid(RegionKind.THREE_PLAYER_SLICE, 4, CFG, x=CFG.E)
        assert region_grid_csv(M3, RegionKind.THREE_PLAYER_SLICE, 4, CFG, x=CFG.E).splitlines()[0] == (
            "kind=ThreePlayerSlice,x=1,resolution=4,A=0,B=1.5,E=1"
        )


class TestBattery:
    def test_all_checks_pass(self, battery):
        failed = [r.check for r in battery if not r.passed]
        assert failed == []
        assert battery_passed(battery)

    def test_check_names_are_stable(self, battery):
        assert [r.check for r in battery] == BATTERY_CHECKS

    def test_reports_carry_runtimes(self, battery):
        assert all(r.runtime_s >= 0.0 for r in battery)
        assert all(r.tolerance >= 0.0 for r in battery)

    def test_fault_injection_hits_only_normalization(self):
        reports = run_battery(seed=42, inject_fault=True)
        assert [r.check for r in reports] == BATTERY_CHECKS
        failed = [r for r in reports if not r.passed]
        assert [r.check for r in failed] == ["strategy-normalization"]
        assert failed[0].worst == ("corrupted",)
        assert abs(failed[0].max_violation - 0.1) < 1e-12
        assert not battery_passed(reports)

    def test_json_identical_across_runs(self, battery):
        again = run_battery(seed=42)
        assert [r.to_json() for r in battery] == [r.to_json() for r in again]

    def test_raising_check_is_isolated(self, monkeypatch):
        import procurelab.experiments as ex

        def boom(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(ex, "value_weighted", boom)
        reports = ex.run_battery(seed=7)
        by_name = {r.check: r for r in reports}
        assert [r.check for r in reports] == BATTERY_CHECKS
        broken = by_name["value-at-half"]
        assert not broken.passed
        assert math.isinf(broken.max_violation)
        assert "boom" in broken.parameters["error"]
        # unrelated checks still ran and passed
        assert by_name["payoff-conservation"].passed
        assert by_name["matrix-constant-sum"].passed

    def test_battery_roundtrips_through_file(self, battery, tmp_path):
        path = tmp_path / "battery.jsonl"
        write_reports(battery, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(BATTERY_CHECKS)
        assert all(json.loads(l)["pass"] for l in lines)
