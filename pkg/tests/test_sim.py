import csv
import json

import numpy as np
import pytest

from rruc.sim import (MODELS, no_ramping_fraction, run_simulation,
                      state_census_diff, write_census_csv,
                      write_decisions_csv, write_report_json)
from rruc.system import STAGES

from conftest import constant_trace, fleet_trace, small_fleet


@pytest.fixture(scope="module")
def flat_report(base):
    fleet = small_fleet(base, 8)
    total = sum(g.p_max for g in fleet)
    trace = constant_trace(0.5 * total, periods=2 * 96, dt=15.0)
    return fleet, trace, run_simulation(fleet, trace, "runtime")


class TestRunSimulation:
    def test_unknown_model_rejected(self, base):
        fleet = small_fleet(base, 4)
        trace = fleet_trace(fleet, days=2, dt=60.0)
        with pytest.raises(ValueError):
            run_simulation(fleet, trace, "mip")

    def test_short_trace_rejected(self, base):
        fleet = small_fleet(base, 4)
        trace = constant_trace(100.0, periods=24, dt=60.0)
        with pytest.raises(ValueError):
            run_simulation(fleet, trace, "runtime")

    def test_report_shape(self, flat_report):
        fleet, trace, report = flat_report
        assert report.model == "runtime"
        assert report.n_generators == len(fleet)
        assert report.horizon == trace.horizon
        assert report.state_census.shape == (trace.horizon, len(STAGES))
        assert report.wall_time > 0.0

    def test_census_rows_sum_to_fleet_size(self, flat_report):
        fleet, _trace, report = flat_report
        assert (report.state_census.sum(axis=1) == len(fleet)).all()

    def test_total_excludes_warmup_day(self, flat_report):
        _fleet, trace, report = flat_report
        per_day = trace.periods_per_day()
        manual = sum(d.objective for d in report.decisions[per_day:])
        assert report.total_objective_excl_warmup == pytest.approx(manual)
        assert report.objective_per_generator == pytest.approx(
            manual / report.n_generators)

    def test_constant_demand_settles(self, flat_report):
        # Flat demand with head-room: after the warm-up day the committed
        # set never changes.
        _fleet, trace, report = flat_report
        per_day = trace.periods_per_day()
        for t in range(per_day, trace.horizon):
            assert not report.decisions[t].starting.any()
            assert not report.decisions[t].stopping.any()
        committed = report.decisions[per_day].committed
        for t in range(per_day, trace.horizon):
            assert (report.decisions[t].committed == committed).all()

    def test_runtime_model_never_ramps(self, flat_report):
        _fleet, _trace, report = flat_report
        assert no_ramping_fraction(report) == 1.0


class TestCensusDiff:
    def test_self_difference_is_zero(self, flat_report):
        _f, _t, report = flat_report
        assert (state_census_diff(report, report) == 0).all()

    def test_horizon_mismatch_rejected(self, base, flat_report):
        _f, _t, report = flat_report
        fleet = small_fleet(base, 8)
        trace = fleet_trace(fleet, days=2, dt=60.0)
        other = run_simulation(fleet, trace, "runtime")
        with pytest.raises(ValueError):
            state_census_diff(report, other)

    def test_profile_difference_localizes_to_ramping(self, base):
        # Same fleet and trace under both ramp profiles: the census
        # difference rows all sum to zero (units merely sit in different
        # stages, none appear or vanish).
        fleet = small_fleet(base, 6)
        trace = fleet_trace(fleet, days=2, dt=15.0, seed=9)
        pw = run_simulation(fleet, trace, "ramp_piecewise")
        sm = run_simulation(fleet, trace, "ramp_smooth")
        diff = state_census_diff(pw, sm)
        assert (diff.sum(axis=1) == 0).all()


class TestWriters:
    def test_decisions_csv(self, flat_report, tmp_path):
        fleet, trace, report = flat_report
        path = tmp_path / "decisions.csv"
        write_decisions_csv(report, path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["period", "unit", "stage", "output_mw"]
        assert len(rows) == 1 + trace.horizon * len(fleet)
        t, i, stage, mw = rows[1]
        assert (t, i) == ("0", "0")
        assert stage in STAGES
        float(mw)  # parses
        # spot-check one record against the in-memory decision
        last = rows[-1]
        d = report.decisions[int(last[0])]
        assert last[2] == d.stages[int(last[1])]
        assert float(last[3]) == pytest.approx(d.outputs[int(last[1])],
                                               rel=1e-8)

    def test_census_csv(self, flat_report, tmp_path):
        _f, trace, report = flat_report
        path = tmp_path / "census.csv"
        write_census_csv(report, path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["period", *STAGES]
        assert len(rows) == 1 + trace.horizon
        for t, row in enumerate(rows[1:]):
            assert row[0] == str(t)
            assert [int(x) for x in row[1:]] == report.state_census[t].tolist()

    def test_report_json(self, flat_report, tmp_path):
        _f, _t, report = flat_report
        path = tmp_path / "report.json"
        write_report_json(report, path)
        with open(path) as f:
            payload = json.load(f)
        assert payload["model"] == "runtime"
        assert payload["horizon"] == report.horizon
        assert payload["no_ramping_fraction"] == 1.0
        assert payload["total_objective_excl_warmup"] == pytest.approx(
            report.total_objective_excl_warmup)
        assert len(payload["objectives"]) == report.horizon


def test_models_registry_is_exercised():
    assert MODELS == ("runtime", "ramp_piecewise", "ramp_smooth")
