import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rruc.fleet import CostCurve, GeneratorSpec, base_fleet
from rruc.ramp import (PIECEWISE, SMOOTH, classify_ramp, ramp_durations,
                       ramp_output, ramping_supply)
from rruc.sim import run_simulation
from rruc.system import (COLD_START_OFF_MIN, EngineConfig, GeneratorState,
                         STAGE_OFF, STAGE_ON, STAGE_PREPARE, STAGE_RAMP_DOWN,
                         STAGE_RAMP_UP)

from conftest import fleet_trace, small_fleet
from replay import validate_report

CFG = EngineConfig()


def _spec(uid="g0", p_min=100.0, p_max=200.0, r_u=5.0, r_d=10.0,
          hot_min=30.0, warm_min=60.0, cold_min=120.0):
    return GeneratorSpec(
        id=uid, cost=CostCurve(0.002, 20.0, 150.0), p_min=p_min, p_max=p_max,
        fuel="gas", ramp_up_rate=r_u, ramp_down_rate=r_d,
        min_runtime=240.0, max_daily_starts=3,
        start_durations={"hot": hot_min, "warm": warm_min, "cold": cold_min},
        start_costs={"hot": 1000.0, "warm": 1300.0, "cold": 1800.0},
        shutdown_cost=500.0)


def _state(stage=STAGE_OFF, stage_age=0, prev_output=0.0, on_duration=0.0,
           off_duration=COLD_START_OFF_MIN, profile=None):
    return GeneratorState(stage=stage, stage_age=stage_age,
                          prev_output=prev_output, on_duration=on_duration,
                          off_duration=off_duration, profile=profile)


class TestRampDurations:
    def test_per_period_limits_and_t_up(self):
        # p_min=100, ramp_up 5 MW/min, dt=5 -> 25 MW/period, 4 periods to p_min
        prof = ramp_durations(_spec(), 5.0, COLD_START_OFF_MIN, PIECEWISE, CFG)
        assert prof.r_u == 25.0
        assert prof.t_up == 4

    def test_combined_stage_can_save_one_period(self):
        # prepare 61 min + 16 min to p_min: separately ceil(61/5)+ceil(16/5)
        # = 13 + 4 = 17 periods; merged, ceil(77/5) = 16.
        spec = _spec(p_min=80.0, hot_min=61.0, warm_min=90.0)
        pw = ramp_durations(spec, 5.0, 60.0, PIECEWISE, CFG)
        sm = ramp_durations(spec, 5.0, 60.0, SMOOTH, CFG)
        assert (pw.t_prepare, pw.t_up) == (13, 4)
        assert sm.t_combined == 16
        assert sm.t_combined == pw.t_prepare + pw.t_up - 1

    def test_gas_ramp_down_duration_matches_rate(self):
        # Gas units ramp down at a fixed fraction of p_max per minute, so
        # t_down must cover p_min / ramp_down_rate minutes.
        for spec in base_fleet():
            if spec.fuel != "gas":
                continue
            prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
            minutes = spec.p_min / spec.ramp_down_rate
            assert prof.t_down == max(1, math.ceil(minutes / 5.0))

    def test_every_duration_at_least_one_period(self):
        # Huge dt: every stage still occupies one full period.
        prof = ramp_durations(_spec(), 1440.0, 0.0, SMOOTH, CFG)
        assert prof.t_prepare == prof.t_up == prof.t_down == 1
        assert prof.t_combined == 1

    def test_colder_start_never_shortens_prepare(self):
        spec = _spec()
        hot = ramp_durations(spec, 5.0, 60.0, PIECEWISE, CFG)
        cold = ramp_durations(spec, 5.0, COLD_START_OFF_MIN, PIECEWISE, CFG)
        assert cold.t_prepare >= hot.t_prepare

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            ramp_durations(_spec(), 0.0, 0.0, PIECEWISE, CFG)


class TestRampOutput:
    def test_linear_ramp_up_midpoint(self):
        spec = _spec(p_min=100.0)
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        assert prof.t_up == 4
        assert ramp_output(spec, prof, STAGE_RAMP_UP, 2) == pytest.approx(50.0)

    def test_quadratic_ramp_up_midpoint(self):
        spec = _spec(p_min=100.0, r_u=10.0, hot_min=10.0)
        prof = ramp_durations(spec, 5.0, 60.0, SMOOTH, CFG)
        assert prof.t_combined == 4
        assert ramp_output(spec, prof, STAGE_RAMP_UP, 2) == pytest.approx(25.0)

    def test_prepare_produces_nothing(self):
        spec = _spec()
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        assert ramp_output(spec, prof, STAGE_PREPARE, 3) == 0.0

    def test_ramp_down_schedule_floors_at_zero(self):
        spec = _spec(p_min=100.0)
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        td = prof.t_down
        assert ramp_output(spec, prof, STAGE_RAMP_DOWN, 1) == pytest.approx(
            100.0 * (1.0 - 1.0 / td))
        assert ramp_output(spec, prof, STAGE_RAMP_DOWN, td) == 0.0
        assert ramp_output(spec, prof, STAGE_RAMP_DOWN, td + 3) == 0.0

    def test_non_ramping_stage_rejected(self):
        spec = _spec()
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        for stage in (STAGE_ON, STAGE_OFF):
            with pytest.raises(ValueError):
                ramp_output(spec, prof, stage, 1)


class TestRampingSupply:
    def test_empty(self):
        supply = ramping_supply([], [])
        assert (supply.s_r, supply.s_max_r, supply.s_min_r) == (0.0, 0.0, 0.0)

    def test_single_unit_ramping_up(self):
        # Unit one period into a 4-period linear ramp: next period it
        # produces 2/4 of p_min=100 -> 50 MW, with full p_max=200 pledged.
        spec = _spec(p_min=100.0, p_max=200.0)
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        state = _state(STAGE_RAMP_UP, stage_age=1, profile=prof)
        supply = ramping_supply([state], [spec])
        assert supply.s_r == pytest.approx(50.0)
        assert supply.s_max_r == 200.0
        assert supply.s_min_r == 100.0

    def test_mixed_stages_aggregate(self):
        spec = _spec(p_min=100.0, p_max=200.0)
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        states = [
            _state(STAGE_PREPARE, stage_age=1, profile=prof),
            _state(STAGE_RAMP_UP, stage_age=1, profile=prof),
            _state(STAGE_RAMP_DOWN, stage_age=0, profile=prof),
            _state(STAGE_ON, prev_output=150.0),
            _state(STAGE_OFF),
        ]
        specs = [spec] * 5
        supply = ramping_supply(states, specs)
        expected_sr = (0.0  # prepare
                       + ramp_output(spec, prof, STAGE_RAMP_UP, 2)
                       + ramp_output(spec, prof, STAGE_RAMP_DOWN, 1))
        assert supply.s_r == pytest.approx(expected_sr)
        # only the units heading up pledge capacity
        assert supply.s_max_r == 400.0
        assert supply.s_min_r == 200.0


class TestClassifyRamp:
    def test_on_unit_far_above_floor_is_must_run(self):
        # prev output cannot reach p_min within one ramp-down period
        spec = _spec(p_min=100.0, r_d=10.0)  # r_d = 50 MW per 5-min period
        state = _state(STAGE_ON, prev_output=151.0, on_duration=960.0)
        mr, disc, exc = classify_ramp([state], [spec], 5.0)
        assert mr == [0]

    def test_on_unit_inside_shutdown_band_is_discretionary(self):
        spec = _spec(p_min=100.0, r_d=10.0)
        state = _state(STAGE_ON, prev_output=150.0, on_duration=960.0)
        mr, disc, exc = classify_ramp([state], [spec], 5.0)
        assert disc == [0]

    def test_short_running_on_unit_is_must_run(self):
        spec = _spec()
        state = _state(STAGE_ON, prev_output=100.0, on_duration=120.0)
        mr, disc, exc = classify_ramp([state], [spec], 5.0)
        assert mr == [0]

    def test_ramping_units_are_excluded(self):
        spec = _spec()
        prof = ramp_durations(spec, 5.0, 0.0, PIECEWISE, CFG)
        for stage in (STAGE_PREPARE, STAGE_RAMP_UP, STAGE_RAMP_DOWN):
            state = _state(stage, stage_age=1, profile=prof)
            mr, disc, exc = classify_ramp([state], [spec], 5.0)
            assert exc == [0]

    def test_start_capped_off_unit_is_excluded(self):
        spec = _spec()
        state = _state(STAGE_OFF)
        state.start_log = [0.0, 1.0, 2.0]
        mr, disc, exc = classify_ramp([state], [spec], 5.0)
        assert exc == [0]

    def test_rested_off_unit_is_discretionary(self):
        mr, disc, exc = classify_ramp([_state(STAGE_OFF)], [_spec()], 5.0)
        assert disc == [0]


@settings(max_examples=300, deadline=None)
@given(
    prep_min=st.floats(1.0, 600.0),
    p_min=st.floats(10.0, 600.0),
    rate=st.floats(0.5, 30.0),
    dt=st.sampled_from([1.0, 5.0, 7.0, 15.0, 30.0, 60.0]),
)
def test_combined_stage_never_longer_than_split(prep_min, p_min, rate, dt):
    spec = _spec(p_min=p_min, r_u=rate, hot_min=prep_min,
                 warm_min=prep_min, cold_min=prep_min, p_max=p_min + 1.0)
    prof = ramp_durations(spec, dt, 0.0, SMOOTH, CFG)
    assert prof.t_combined <= prof.t_prepare + prof.t_up


def test_combined_stage_strictly_shorter_for_fractional_splits():
    # Both sub-durations round up, the merged duration rounds up once.
    spec = _spec(p_min=80.0, r_u=5.0, hot_min=61.0, warm_min=90.0)
    prof = ramp_durations(spec, 5.0, 60.0, SMOOTH, CFG)
    assert prof.t_combined < prof.t_prepare + prof.t_up


@pytest.mark.parametrize("model", ["ramp_piecewise", "ramp_smooth"])
def test_desk_simulation_replays_clean(base, model):
    fleet = small_fleet(base, 8)
    trace = fleet_trace(fleet, days=2, dt=15.0, seed=11)
    report = run_simulation(fleet, trace, model)
    violations = validate_report(report, fleet, trace, model)
    assert violations == []


def test_oversized_steady_state_has_no_ramping(base):
    # Plenty of head-room and flat demand: after warm-up nobody transitions.
    fleet = small_fleet(base, 10)
    trace = fleet_trace(fleet, days=2, dt=15.0, seed=3,
                        low_frac=0.50, peak_frac=0.55)
    report = run_simulation(fleet, trace, "ramp_piecewise")
    per_day = trace.periods_per_day()
    for t in range(per_day, len(report.decisions)):
        assert not report.decisions[t].starting.any()
        assert not report.decisions[t].stopping.any()
