import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rruc import forecast_stats, synthesize_demand
from rruc.demand import DemandError, DemandTrace, load_demand_csv, save_demand_csv

from conftest import constant_trace


class TestSynthesizeDemand:
    def test_eight_day_five_minute_trace_has_2304_periods(self):
        trace = synthesize_demand(78_600.0, 160_200.0, days=8, dt=5.0, seed=0)
        assert trace.horizon == 2304
        assert trace.periods_per_day() == 288

    def test_daily_low_and_final_peak(self):
        low, peak = 78_600.0, 160_200.0
        trace = synthesize_demand(low, peak, days=8, dt=5.0, seed=3)
        per_day = trace.periods_per_day()
        for d in range(8):
            day = trace.values[d * per_day:(d + 1) * per_day]
            assert float(np.min(day)) == pytest.approx(low, rel=1e-9)
        assert float(np.max(trace.values)) == pytest.approx(peak, rel=1e-6)

    def test_degenerate_amplitude(self):
        eps = 1e-6
        trace = synthesize_demand(1000.0 - eps, 1000.0, days=1, dt=5.0, seed=0)
        assert float(np.max(trace.values) - np.min(trace.values)) <= eps

    def test_deterministic(self):
        a = synthesize_demand(100.0, 200.0, days=2, dt=5.0, seed=42)
        b = synthesize_demand(100.0, 200.0, days=2, dt=5.0, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_smooth_steps(self):
        trace = synthesize_demand(78_600.0, 160_200.0, days=8, dt=5.0, seed=1)
        steps = np.abs(np.diff(trace.values))
        assert float(np.max(steps)) <= 0.01 * 160_200.0

    def test_argument_errors(self):
        with pytest.raises(DemandError):
            synthesize_demand(200.0, 100.0, days=1, dt=5.0, seed=0)
        with pytest.raises(DemandError):
            synthesize_demand(100.0, 200.0, days=0, dt=5.0, seed=0)
        with pytest.raises(DemandError):
            synthesize_demand(100.0, 200.0, days=1, dt=7.0, seed=0)


class TestForecastStats:
    def test_constant_window(self):
        trace = constant_trace(500.0, 100)
        fw = forecast_stats(trace, 10, base_sigma=5.0)
        assert fw.d_min_72 == fw.d_max_72 == 500.0
        assert fw.d_now == 500.0

    def test_window_extremes_small_trace(self):
        # dt = 1440 min -> the 72 h window spans exactly 3 periods
        trace = DemandTrace(dt=1440.0, values=np.array(
            [1000.0, 2000.0, 3000.0, 4000.0, 5000.0]), sigma_d=0.0)
        fw = forecast_stats(trace, 0, base_sigma=0.0)
        assert fw.d_min_72 == 1000.0
        assert fw.d_max_72 == 3000.0

    def test_sigma_multiplier(self):
        trace = constant_trace(500.0, 10)
        fw = forecast_stats(trace, 0, base_sigma=1000.0, demand_multiplier=4.0)
        assert fw.sigma_d == 4000.0

    def test_tail_window_is_last_value(self):
        trace = DemandTrace(dt=5.0, values=np.linspace(100.0, 200.0, 50),
                            sigma_d=0.0)
        fw = forecast_stats(trace, 49, base_sigma=0.0)
        assert fw.d_min_72 == fw.d_max_72 == trace.values[-1]

    def test_out_of_range(self):
        trace = constant_trace(500.0, 10)
        with pytest.raises(IndexError):
            forecast_stats(trace, 10, base_sigma=0.0)
        with pytest.raises(IndexError):
            forecast_stats(trace, -1, base_sigma=0.0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), t=st.integers(0, 199))
    def test_matches_brute_force_scan(self, seed, t):
        rng = np.random.default_rng(seed)
        values = rng.uniform(50.0, 500.0, size=200)
        trace = DemandTrace(dt=30.0, values=values, sigma_d=0.0)
        span = int(72 * 60 / 30)
        window = values[t:t + span]
        fw = forecast_stats(trace, t, base_sigma=1.0)
        assert fw.d_min_72 == min(window)
        assert fw.d_max_72 == max(window)


class TestDemandIO:
    def test_csv_roundtrip(self, tmp_path):
        trace = synthesize_demand(100.0, 200.0, days=1, dt=5.0, seed=9,
                                  sigma_d=2.0)
        path = tmp_path / "demand.csv"
        save_demand_csv(trace, path)
        back = load_demand_csv(path, dt=5.0, sigma_d=2.0)
        assert np.array_equal(back.values, trace.values)
        assert back.dt == trace.dt

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "demand.csv"
        path.write_text("time,mw\n0,100\n")
        with pytest.raises(DemandError):
            load_demand_csv(path, dt=5.0, sigma_d=0.0)
