"""Relax-and-round unit commitment with sub-hourly runtime and ramp constraints."""

from .fleet import (CostCurve, Fleet, GeneratorSpec, base_fleet,
                    fit_quadratic_cost, load_fleet, save_fleet,
                    synthesize_fleet)
from .demand import (DemandTrace, ForecastWindow, forecast_stats,
                     load_demand_csv, save_demand_csv, synthesize_demand)
from .dispatch import (Dispatch, DispatchProblem, DispatchUnit,
                       economic_dispatch, verify_kkt_dispatch)
from .relaxation import (RelaxedProblem, RelaxedSolution, RelaxedUnit,
                         order_candidates, solve_relaxed)
from .core import (CommitRange, PeriodDecision, SweepUnit, find_commit_range,
                   reserve_margin, sweep_dispatch)
from .runtime_uc import (Classification, classify_generators, startup_penalty,
                         step_runtime_uc)
from .ramp import (RampProfile, RampingSupply, classify_ramp, ramp_durations,
                   ramp_output, ramping_supply, step_ramp_uc)
from .oracle import (OracleProblem, OracleResult, OracleUnit, exhaustive_uc,
                     gap)
from .sim import (SimulationReport, run_simulation, state_census_diff,
                  no_ramping_fraction)
from .bench import ScalingReport, fit_power_law, scaling_study
from .system import EngineConfig, GeneratorState, System
from .kernels import NUMBA_ENABLED

__version__ = "0.1.0"
