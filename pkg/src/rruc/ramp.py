"""Ramp-constrained model: generator state machine, ramp profiles, supply
from uncontrollable ramping units, and the per-period commitment step.

Stage machine (piecewise profile): off -> prepare -> ramp_up -> on ->
ramp_down -> off.  The smooth profile merges prepare and ramp_up into a
single quadratic stage (represented as ramp_up) that can finish one period
earlier than the two rounded stages combined.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (FLAG_RELAX_FALLBACK, PeriodDecision, SweepUnit,
                   find_commit_range, sweep_dispatch)
from .demand import forecast_stats
from .relaxation import (RelaxationInfeasible, RelaxedProblem, RelaxedUnit,
                         order_candidates, solve_relaxed)
from .runtime_uc import start_type, startup_penalty
from .system import (STAGE_OFF, STAGE_ON, STAGE_PREPARE, STAGE_RAMP_DOWN,
                     STAGE_RAMP_UP)

PIECEWISE = "piecewise"
SMOOTH = "smooth"


@dataclass(frozen=True)
class RampProfile:
    kind: str
    t_prepare: int  # periods
    t_up: int  # periods (smooth: unused, see t_combined)
    t_down: int  # periods
    t_combined: int  # periods, smooth start stage
    r_u: float  # MW per period
    r_d: float  # MW per period

    def start_stage_length(self):
        return self.t_combined if self.kind == SMOOTH else self.t_up


def ramp_durations(spec, dt, off_duration, kind, config):
    """Whole-period stage durations, rounded up (feasibility-preserving) and
    floored at one period each."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    stype = start_type(spec, off_duration, config)
    prep_min = spec.start_durations[stype]
    up_min = spec.p_min / spec.ramp_up_rate
    down_min = spec.p_min / spec.ramp_down_rate
    return RampProfile(
        kind=kind,
        t_prepare=max(1, math.ceil(prep_min / dt)),
        t_up=max(1, math.ceil(up_min / dt)),
        t_down=max(1, math.ceil(down_min / dt)),
        t_combined=max(1, math.ceil((prep_min + up_min) / dt)),
        r_u=spec.ramp_up_rate * dt,
        r_d=spec.ramp_down_rate * dt,
    )


def ramp_output(spec, profile, stage, stage_age):
    """Scheduled output of an uncontrollable ramping unit at a given age
    (age counted at the end of the period being produced)."""
    if stage == STAGE_PREPARE:
        return 0.0
    if stage == STAGE_RAMP_UP:
        if profile.kind == SMOOTH:
            return spec.p_min * (stage_age / profile.t_combined) ** 2
        return spec.p_min * stage_age / profile.t_up
    if stage == STAGE_RAMP_DOWN:
        return max(0.0, spec.p_min * (1.0 - stage_age / profile.t_down))
    raise ValueError(f"not a ramping stage: {stage}")


@dataclass(frozen=True)
class RampingSupply:
    s_r: float  # MW produced by ramping units this period
    s_max_r: float  # capacity of units ramping up
    s_min_r: float  # output floors of units ramping up


def ramping_supply(states, specs):
    """Aggregate supply terms from units already in ramping stages.  Units
    ramping down contribute output only, not capacity."""
    s_r = s_max = s_min = 0.0
    for state, spec in zip(states, specs):
        if state.stage in (STAGE_PREPARE, STAGE_RAMP_UP):
            s_r += ramp_output(spec, state.profile, state.stage, state.stage_age + 1)
            s_max += spec.p_max
            s_min += spec.p_min
        elif state.stage == STAGE_RAMP_DOWN:
            s_r += ramp_output(spec, state.profile, state.stage, state.stage_age + 1)
    return RampingSupply(s_r=s_r, s_max_r=s_max, s_min_r=s_min)


def classify_ramp(states, specs, dt):
    """Partition for the ramp model.  Must-run: on units whose minimum
    runtime is unmet (every on stage lasts at least one period) or whose
    output is too far above p_min to enter the shutdown band.  Excluded: off
    units at the start cap or just promoted from ramp_down this period, plus
    every ramping unit (uncontrollable).  Discretionary: the rest."""
    must_run, discretionary, excluded = [], [], []
    for i, (state, spec) in enumerate(zip(states, specs)):
        if state.stage == STAGE_ON:
            r_d = spec.ramp_down_rate * dt
            if (state.on_duration < max(spec.min_runtime, dt)
                    or state.prev_output > spec.p_min + r_d):
                must_run.append(i)
            else:
                discretionary.append(i)
        elif state.stage == STAGE_OFF:
            if (state.starts_in_window >= spec.max_daily_starts
                    or state.off_duration < dt):
                excluded.append(i)
            else:
                discretionary.append(i)
        else:
            excluded.append(i)
    return must_run, discretionary, excluded


def _advance_ramping(system):
    """Age ramping units one period and promote finished stages."""
    for state, spec in zip(system.states, system.specs):
        if state.stage == STAGE_PREPARE:
            if state.stage_age >= state.profile.t_prepare:
                state.stage = STAGE_RAMP_UP
                state.stage_age = 0
        elif state.stage == STAGE_RAMP_UP:
            if state.stage_age >= state.profile.start_stage_length():
                state.stage = STAGE_ON
                state.stage_age = 0
                state.on_duration = 0.0
                state.prev_output = spec.p_min
        elif state.stage == STAGE_RAMP_DOWN:
            if state.stage_age >= state.profile.t_down:
                state.stage = STAGE_OFF
                state.stage_age = 0
                state.off_duration = 0.0
                state.prev_output = 0.0
                state.profile = None


def step_ramp_uc(system, t, kind=None):
    """One period of the runtime-and-ramp-constrained relax-and-round step."""
    specs = system.specs
    states = system.states
    cfg = system.config
    kind = kind or cfg.ramp_profile
    trace = system.trace
    dt = trace.dt
    now = t * dt
    n = len(specs)

    for s in states:
        s.prune_window(now)
    _advance_ramping(system)

    mr, disc, _exc = classify_ramp(states, specs, dt)
    supply = ramping_supply(states, specs)
    fw = forecast_stats(trace, t, trace.sigma_d)
    demand = float(trace.values[t])
    sigma = fw.sigma_d

    admissible = mr + disc
    reserve = max(specs[i].p_max for i in admissible) if admissible else 0.0
    penalties = {i: startup_penalty(specs[i], states[i], cfg) for i in disc}

    def bounds(i):
        spec, state = specs[i], states[i]
        lo = max(spec.p_min, state.prev_output - spec.ramp_down_rate * dt)
        hi = min(spec.p_max, state.prev_output + spec.ramp_up_rate * dt)
        return lo, max(lo, hi)

    mr_lo = [bounds(i)[0] for i in mr]
    mr_hi = [bounds(i)[1] for i in mr]
    mr_p_min = float(sum(specs[i].p_min for i in mr))
    mr_p_max = float(sum(specs[i].p_max for i in mr))
    mr_r = max((specs[i].p_max for i in mr), default=0.0)

    demand_net = demand - supply.s_r
    upper_rhs = fw.d_max_72 + 3.0 * sigma - supply.s_max_r
    lower_rhs = fw.d_min_72 - sigma - supply.s_min_r

    flags = []
    order = _order_ramp(system, mr, disc, mr_lo, mr_hi, demand_net,
                        upper_rhs + reserve, lower_rhs, penalties,
                        bounds, flags)
    ordered = [disc[j] for j in order]

    rng = find_commit_range(
        ordered_p_max=[specs[i].p_max for i in ordered],
        ordered_p_min=[specs[i].p_min for i in ordered],
        must_run_p_max_sum=mr_p_max,
        must_run_p_min_sum=mr_p_min,
        must_run_r=mr_r,
        upper_rhs=upper_rhs,
        lower_rhs=lower_rhs,
    )
    flags.extend(rng.flags)

    mr_units = [SweepUnit(specs[i].cost.a, specs[i].cost.b, specs[i].cost.c,
                          lo, hi) for i, lo, hi in zip(mr, mr_lo, mr_hi)]
    sw_units = []
    for i in ordered:
        spec, state = specs[i], states[i]
        was_on = state.stage == STAGE_ON
        if was_on:
            lo, hi = bounds(i)
            sw_units.append(SweepUnit(
                spec.cost.a, spec.cost.b, spec.cost.c, lo, hi,
                stop_penalty=penalties[i],
                stop_demand_credit=max(0.0, spec.p_min - spec.ramp_down_rate * dt),
            ))
        else:
            bias = cfg.beta * spec.average_cost_at_p_typ()
            sw_units.append(SweepUnit(
                spec.cost.a, spec.cost.b, spec.cost.c, spec.p_min, spec.p_max,
                commit_penalty=penalties[i] + bias, produces=False,
            ))

    k, out_m, out_d, objective, shortfall, sweep_flags = sweep_dispatch(
        mr_units, sw_units, rng, demand_net,
        parallel=cfg.sweep_parallel, max_width=cfg.sweep_max_width)
    flags.extend(sweep_flags)

    committed = np.zeros(n, dtype=bool)
    starting = np.zeros(n, dtype=bool)
    stopping = np.zeros(n, dtype=bool)
    outputs = np.zeros(n)
    stages = [None] * n

    for idx, i in enumerate(mr):
        committed[i] = True
        outputs[i] = out_m[idx]
    for j, i in enumerate(ordered):
        if j < k:
            if states[i].stage == STAGE_ON:
                committed[i] = True
                outputs[i] = out_d[j]
            else:
                starting[i] = True
        elif states[i].stage == STAGE_ON:
            stopping[i] = True

    # commit state transitions and fill outputs for uncontrollable units
    for i, (state, spec) in enumerate(zip(states, specs)):
        if starting[i]:
            profile = ramp_durations(spec, dt, state.off_duration, kind, cfg)
            state.profile = profile
            state.stage = STAGE_PREPARE if kind == PIECEWISE else STAGE_RAMP_UP
            state.stage_age = 1
            state.off_duration = 0.0
            state.start_log.append(now)
            outputs[i] = ramp_output(spec, profile, state.stage, 1)
            state.prev_output = outputs[i]
        elif stopping[i]:
            state.profile = state.profile or ramp_durations(spec, dt, 0.0, kind, cfg)
            state.stage = STAGE_RAMP_DOWN
            state.stage_age = 1
            state.on_duration = 0.0
            outputs[i] = max(0.0, spec.p_min - spec.ramp_down_rate * dt)
            state.prev_output = outputs[i]
        elif committed[i]:
            state.stage = STAGE_ON
            state.on_duration += dt
            state.prev_output = float(outputs[i])
        elif state.stage in (STAGE_PREPARE, STAGE_RAMP_UP, STAGE_RAMP_DOWN):
            state.stage_age += 1
            outputs[i] = ramp_output(spec, state.profile, state.stage, state.stage_age)
            state.prev_output = outputs[i]
        else:
            state.off_duration += dt
            state.prev_output = 0.0
        stages[i] = state.stage

    return PeriodDecision(
        committed=committed, starting=starting, stopping=stopping,
        outputs=outputs, stages=stages, objective=objective,
        k_selected=len(mr) + k, shortfall=shortfall, flags=flags,
        diagnostics={"period": t, "range": (rng.m, rng.m_max), "s_r": supply.s_r},
    )


def _order_ramp(system, mr, disc, mr_lo, mr_hi, demand_net, cap_req,
                floor_allow, penalties, bounds, flags):
    specs = system.specs
    states = system.states
    cfg = system.config
    disc_specs = [specs[i] for i in disc]
    if not disc:
        return []

    units = []
    for i in disc:
        spec, state = specs[i], states[i]
        if state.stage == STAGE_ON:
            lo, hi = bounds(i)
            units.append(RelaxedUnit(
                a=spec.cost.a, b=spec.cost.b, c=spec.cost.c,
                p_lo=lo, p_hi=hi, p_min=spec.p_min, p_max=spec.p_max,
                switch_penalty=penalties[i], y0=1.0,
                demand_const=max(0.0, spec.p_min - spec.ramp_down_rate * system.trace.dt),
            ))
        else:
            units.append(RelaxedUnit(
                a=0.0, b=0.0, c=0.0, p_lo=0.0, p_hi=0.0,
                p_min=spec.p_min, p_max=spec.p_max,
                switch_penalty=penalties[i], y0=0.0,
                start_bias=cfg.beta * spec.average_cost_at_p_typ(),
                has_output=False,
            ))
    problem = RelaxedProblem(
        units=units, demand=demand_net,
        cap_requirement=cap_req, floor_allowance=floor_allow,
        must_run_lo=float(sum(mr_lo)), must_run_hi=float(sum(mr_hi)),
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
