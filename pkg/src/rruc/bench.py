"""Scaling study across fleet multiples with a log-log power-law fit."""

import csv
from dataclasses import dataclass

import numpy as np

from .demand import synthesize_demand
from .fleet import synthesize_fleet
from .sim import run_simulation

# full-scale demand anchors for the 22x (924-unit) system, in MW
FULL_SYSTEM_MULTIPLIER = 22
FULL_SYSTEM_LOW_MW = 78_600.0
FULL_SYSTEM_PEAK_MW = 160_200.0
FULL_SYSTEM_SIGMA_MW = 1_000.0

DESK_MULTIPLIERS = (1, 2, 4, 8, 16)


@dataclass
class ScalingReport:
    model: str
    rows: list  # (n_generators, wall_time_s, objective_per_generator)
    fitted_exponent: float
    per_doubling_time_ratio: float
    per_doubling_objective_ratio: float


def fit_power_law(sizes, times):
    """Least-squares slope of ln(time) against ln(size)."""
    sizes = np.asarray(sizes, dtype=float)
    times = np.asarray(times, dtype=float)
    if len(sizes) < 3:
        raise ValueError("need at least 3 (size, time) pairs")
    if np.any(sizes <= 0) or np.any(times <= 0):
        raise ValueError("sizes and times must be positive")
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    return float(slope)


def demand_for_multiplier(multiplier, days, dt, seed, sigma_scale=1.0):
    """Demand trace scaled linearly with the fleet multiple relative to the
    22x full system."""
    scale = multiplier / FULL_SYSTEM_MULTIPLIER
    return synthesize_demand(
        low=FULL_SYSTEM_LOW_MW * scale,
        peak=FULL_SYSTEM_PEAK_MW * scale,
        days=days, dt=dt, seed=seed,
        sigma_d=FULL_SYSTEM_SIGMA_MW * scale * sigma_scale,
    )


def scaling_study(base_fleet, multipliers, model, config=None, days=2, dt=5.0,
                  seed=0):
    if len(multipliers) < 3:
        raise ValueError("need at least 3 multipliers")
    rows = []
    for mult in multipliers:
        fleet = synthesize_fleet(base_fleet, mult, seed=seed + mult)
        trace = demand_for_multiplier(mult, days=days, dt=dt, seed=seed)
        report = run_simulation(fleet, trace, model, config)
        rows.append((len(fleet), report.wall_time, report.objective_per_generator))

    sizes = [r[0] for r in rows]
    times = [r[1] for r in rows]
    objs = [r[2] for r in rows]
    return ScalingReport(
        model=model,
        rows=rows,
        fitted_exponent=fit_power_law(sizes, times),
        per_doubling_time_ratio=_doubling_ratio(sizes, times),
        per_doubling_objective_ratio=_doubling_ratio(sizes, objs),
    )


def _doubling_ratio(sizes, values):
    """Geometric mean ratio across consecutive size-doubling rows."""
    ratios = []
    for i in range(len(sizes) - 1):
        if abs(sizes[i + 1] / sizes[i] - 2.0) < 1e-9:
            ratios.append(values[i + 1] / values[i])
    if not ratios:
        return float("nan")
    return float(np.exp(np.mean(np.log(ratios))))


def write_scaling_csv(report, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "seconds", "objective_per_gen"])
        for n, sec, obj in report.rows:
            w.writerow([n, f"{sec:.6f}", f"{obj:.9g}"])


def write_scaling_svg(report, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sizes = [r[0] for r in report.rows]
    times = [r[1] for r in report.rows]
    objs = [r[2] for r in report.rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.loglog(sizes, times, "o-")
    ax1.set_xlabel("generators")
    ax1.set_ylabel("wall time [s]")
    ax1.set_title(f"{report.model}: runtime ~ n^{report.fitted_exponent:.2f}")
    ax2.semilogx(sizes, objs, "o-")
    ax2.set_xlabel("generators")
    ax2.set_ylabel("objective per generator [$]")
    ax2.set_title("per-generator objective")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
