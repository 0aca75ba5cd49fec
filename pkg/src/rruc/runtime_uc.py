"""Runtime-constrained model: rolling start windows, must-run/can't-start
classification, switch penalties, and the per-period commitment step."""

from dataclasses import dataclass

import numpy as np

from .core import (FLAG_RELAX_FALLBACK, PeriodDecision, SweepUnit,
                   find_commit_range, sweep_dispatch)
from .demand import forecast_stats
from .relaxation import (RelaxationInfeasible, RelaxedProblem, RelaxedUnit,
                         order_candidates, solve_relaxed)
from .system import STAGE_OFF, STAGE_ON


@dataclass(frozen=True)
class Classification:
    must_run: tuple
    discretionary: tuple
    excluded: tuple


def classify_generators(states, specs, t=None):
    """Runtime-model partition: must-run (on, minimum runtime unmet),
    excluded (off, daily start cap reached), discretionary otherwise."""
    must_run, discretionary, excluded = [], [], []
    for i, (state, spec) in enumerate(zip(states, specs)):
        if state.stage == STAGE_ON and state.on_duration < spec.min_runtime:
            must_run.append(i)
        elif state.stage == STAGE_OFF and state.starts_in_window >= spec.max_daily_starts:
            excluded.append(i)
        else:
            discretionary.append(i)
    return Classification(tuple(must_run), tuple(discretionary), tuple(excluded))


def start_type(spec, off_duration, config):
    if off_duration < config.hot_start_max_off_min:
        return "hot"
    if off_duration < config.warm_start_max_off_min:
        return "warm"
    return "cold"


def startup_penalty(spec, state, config):
    """Symmetric switch penalty: average of the applicable start cost and the
    shutdown cost.  On units use the hot start cost (they would restart hot)."""
    if state.stage == STAGE_ON:
        start_cost = spec.start_costs["hot"]
    else:
        start_cost = spec.start_costs[start_type(spec, state.off_duration, config)]
    return 0.5 * (start_cost + spec.shutdown_cost)


def step_runtime_uc(system, t):
    """One period of the runtime-constrained relax-and-round step."""
    specs = system.specs
    states = system.states
    cfg = system.config
    trace = system.trace
    dt = trace.dt
    now = t * dt
    n = len(specs)

    for s in states:
        s.prune_window(now)

    cls = classify_generators(states, specs, t)
    fw = forecast_stats(trace, t, trace.sigma_d)
    demand = float(trace.values[t])
    sigma = fw.sigma_d

    mr = list(cls.must_run)
    disc = list(cls.discretionary)
    admissible = mr + disc
    reserve = max(specs[i].p_max for i in admissible) if admissible else 0.0

    mr_p_min = float(sum(specs[i].p_min for i in mr))
    mr_p_max = float(sum(specs[i].p_max for i in mr))
    mr_r = max((specs[i].p_max for i in mr), default=0.0)
    penalties = {i: startup_penalty(specs[i], states[i], cfg) for i in disc}

    flags = []
    order = _order_discretionary(system, cls, demand, fw, sigma, reserve,
                                 mr_p_min, mr_p_max, penalties, flags)
    ordered = [disc[j] for j in order]

    rng = find_commit_range(
        ordered_p_max=[specs[i].p_max for i in ordered],
        ordered_p_min=[specs[i].p_min for i in ordered],
        must_run_p_max_sum=mr_p_max,
        must_run_p_min_sum=mr_p_min,
        must_run_r=mr_r,
        upper_rhs=fw.d_max_72 + 3.0 * sigma,
        lower_rhs=fw.d_min_72 - sigma,
    )
    flags.extend(rng.flags)

    mr_units = [SweepUnit(specs[i].cost.a, specs[i].cost.b, specs[i].cost.c,
                          specs[i].p_min, specs[i].p_max) for i in mr]
    sw_units = []
    for i in ordered:
        spec, state = specs[i], states[i]
        was_on = state.stage == STAGE_ON
        sw_units.append(SweepUnit(
            spec.cost.a, spec.cost.b, spec.cost.c, spec.p_min, spec.p_max,
            commit_penalty=0.0 if was_on else penalties[i],
            stop_penalty=penalties[i] if was_on else 0.0,
        ))

    k, out_m, out_d, objective, shortfall, sweep_flags = sweep_dispatch(
        mr_units, sw_units, rng, demand,
        parallel=cfg.sweep_parallel, max_width=cfg.sweep_max_width)
    flags.extend(sweep_flags)

    committed = np.zeros(n, dtype=bool)
    starting = np.zeros(n, dtype=bool)
    stopping = np.zeros(n, dtype=bool)
    outputs = np.zeros(n)
    for idx, i in enumerate(mr):
        committed[i] = True
        outputs[i] = out_m[idx]
    for j, i in enumerate(ordered):
        if j < k:
            committed[i] = True
            outputs[i] = out_d[j]
            if states[i].stage == STAGE_OFF:
                starting[i] = True
        elif states[i].stage == STAGE_ON:
            stopping[i] = True

    _apply(system, committed, outputs, now, dt)
    stages = [STAGE_ON if committed[i] else STAGE_OFF for i in range(n)]
    return PeriodDecision(
        committed=committed, starting=starting, stopping=stopping,
        outputs=outputs, stages=stages, objective=objective,
        k_selected=len(mr) + k, shortfall=shortfall, flags=flags,
        diagnostics={"period": t, "range": (rng.m, rng.m_max),
                     "excluded": len(cls.excluded)},
    )


def _order_discretionary(system, cls, demand, fw, sigma, reserve,
                         mr_p_min, mr_p_max, penalties, flags):
    specs = system.specs
    states = system.states
    cfg = system.config
    disc = list(cls.discretionary)
    disc_specs = [specs[i] for i in disc]
    if not disc:
        return []

    units = [RelaxedUnit(
        a=specs[i].cost.a, b=specs[i].cost.b, c=specs[i].cost.c,
        p_lo=specs[i].p_min, p_hi=specs[i].p_max,
        p_min=specs[i].p_min, p_max=specs[i].p_max,
        switch_penalty=penalties[i],
        y0=1.0 if states[i].stage == STAGE_ON else 0.0,
    ) for i in disc]
    problem = RelaxedProblem(
        units=units, demand=demand,
        cap_requirement=fw.d_max_72 + 3.0 * sigma + reserve,
        floor_allowance=fw.d_min_72 - sigma,
        must_run_lo=mr_p_min, must_run_hi=mr_p_max,
    )
    try:
        sol = solve_relaxed(problem, tol=cfg.relax_tol,
                            max_outer=cfg.relax_max_outer,
                            max_inner=cfg.relax_max_inner)
    except RelaxationInfeasible:
        flags.append(FLAG_RELAX_FALLBACK)
        return order_candidates(None, disc_specs, fallback=True)
    if not sol.converged:
        flags.append(FLAG_RELAX_FALLBACK)
        return order_candidates(None, disc_specs, fallback=True)
    return order_candidates(sol, disc_specs)


def _apply(system, committed, outputs, now, dt):
    for i, (state, spec) in enumerate(zip(system.states, system.specs)):
        if committed[i]:
            if state.stage == STAGE_OFF:
                state.start_log.append(now)
                state.on_duration = 0.0
                state.off_duration = 0.0
            state.stage = STAGE_ON
            state.on_duration += dt
            state.prev_output = float(outputs[i])
        else:
            if state.stage == STAGE_ON:
                state.on_duration = 0.0
            state.stage = STAGE_OFF
            state.off_duration += dt
            state.prev_output = 0.0
