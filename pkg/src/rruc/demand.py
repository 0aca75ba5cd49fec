"""Demand trace synthesis, CSV ingestion, and 72-hour forecast windows."""

import csv
from dataclasses import dataclass

import numpy as np

FORECAST_HORIZON_MIN = 72 * 60


class DemandError(ValueError):
    pass


@dataclass(frozen=True)
class DemandTrace:
    dt: float  # minutes per period
    values: np.ndarray  # MW
    sigma_d: float  # MW

    def __post_init__(self):
        if self.dt <= 0:
            raise DemandError("dt must be positive")
        if len(self.values) == 0 or np.min(self.values) <= 0:
            raise DemandError("demand values must all be positive")

    @property
    def horizon(self):
        return len(self.values)

    def periods_per_day(self):
        return int(round(24 * 60 / self.dt))


@dataclass(frozen=True)
class ForecastWindow:
    d_now: float
    d_min_72: float
    d_max_72: float
    sigma_d: float


def synthesize_demand(low, peak, days, dt, seed, sigma_d=0.0):
    """Deterministic diurnal trace with daily low `low` and the day maximum
    rising linearly to `peak` on the final day.

    The intra-day shape is a raised cosine with a seeded per-day exponent in
    [1.0, 1.5], which skews the peak without moving the midnight minimum.
    """
    if not (0 < low < peak):
        raise DemandError("need 0 < low < peak")
    if days < 1:
        raise DemandError("days must be >= 1")
    if 60 % int(dt) != 0:
        raise DemandError("dt must divide 60")
    rng = np.random.default_rng(seed)
    per_day = int(round(24 * 60 / dt))
    values = np.empty(days * per_day)
    for d in range(days):
        amp = (peak - low) * (d + 1) / days
        power = rng.uniform(1.0, 1.5)
        frac = np.arange(per_day) / per_day
        shape = ((1.0 - np.cos(2.0 * np.pi * frac)) / 2.0) ** power
        values[d * per_day:(d + 1) * per_day] = low + amp * shape
    return DemandTrace(dt=float(dt), values=values, sigma_d=sigma_d)


def forecast_stats(trace, t, base_sigma, demand_multiplier=1.0):
    """Min/max of the trace over [t, t + 72h), clipped at the trace end."""
    if not (0 <= t < trace.horizon):
        raise IndexError(f"period {t} outside trace of {trace.horizon}")
    span = int(round(FORECAST_HORIZON_MIN / trace.dt))
    window = trace.values[t:t + span]
    return ForecastWindow(
        d_now=float(trace.values[t]),
        d_min_72=float(np.min(window)),
        d_max_72=float(np.max(window)),
        sigma_d=base_sigma * demand_multiplier,
    )


def save_demand_csv(trace, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["period_index", "demand_mw"])
        for i, v in enumerate(trace.values):
            w.writerow([i, repr(float(v))])


def load_demand_csv(path, dt, sigma_d):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["period_index", "demand_mw"]:
        raise DemandError("demand CSV must have header period_index,demand_mw")
    values = np.array([float(r[1]) for r in rows[1:]])
    return DemandTrace(dt=float(dt), values=values, sigma_d=sigma_d)
