"""Rounding sweep: committable index range and cheapest-dispatch selection."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dispatch import DispatchProblem, DispatchUnit, economic_dispatch

FLAG_CAP_INFEASIBLE = "capacity_infeasible"
FLAG_FLOOR_VIOLATED = "min_constraint_violated"
FLAG_SHORTFALL = "shortfall"
FLAG_RELAX_FALLBACK = "relaxation_fallback"

_EXECUTOR = None


def _executor():
    global _EXECUTOR
    if _EXECUTOR is None:
        _EXECUTOR = ThreadPoolExecutor(max_workers=4)
    return _EXECUTOR


@dataclass(frozen=True)
class CommitRange:
    m: int  # minimum committed count (must-run included)
    m_max: int  # maximum committed count
    reserve_r: float  # reserve margin at the minimal prefix
    flags: tuple = ()


@dataclass
class PeriodDecision:
    committed: np.ndarray  # u, per unit
    starting: np.ndarray  # v
    stopping: np.ndarray  # w
    outputs: np.ndarray  # MW per unit
    stages: list  # stage name per unit, for logs/census
    objective: float
    k_selected: int
    shortfall: float = 0.0
    flags: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def reserve_margin(p_max_values):
    """Largest capacity among the units that can run (must-run + prefix)."""
    if len(p_max_values) == 0:
        raise ValueError("reserve margin of an empty admissible set")
    return float(max(p_max_values))


def find_commit_range(ordered_p_max, ordered_p_min, must_run_p_max_sum,
                      must_run_p_min_sum, must_run_r, upper_rhs, lower_rhs):
    """Committable count range [m, m_max] from the reserve constraints.

    m: smallest prefix whose capacity (plus must-run) covers upper_rhs plus
    the prefix-dependent reserve margin.  m_max: largest prefix whose output
    floors stay within lower_rhs.  Counts include the must-run units; the
    must-run contribution to m/m_max is expressed by the caller adding
    |must_run| afterwards (this function works in prefix lengths).
    """
    n = len(ordered_p_max)
    flags = []

    m_tilde = None
    running_r = must_run_r
    cap = must_run_p_max_sum
    if cap >= upper_rhs + running_r and (running_r > 0 or upper_rhs <= 0):
        m_tilde = 0
    else:
        for j in range(n):
            cap += ordered_p_max[j]
            running_r = max(running_r, ordered_p_max[j])
            if cap >= upper_rhs + running_r:
                m_tilde = j + 1
                break
    if m_tilde is None:
        m_tilde = n
        running_r = max([must_run_r, *ordered_p_max]) if (n or must_run_r) else 0.0
        flags.append(FLAG_CAP_INFEASIBLE)
    reserve_at_m = max([must_run_r, *ordered_p_max[:m_tilde]]) if (m_tilde or must_run_r) else 0.0

    floor = must_run_p_min_sum
    m_tilde_max = 0
    if floor > lower_rhs:
        flags.append(FLAG_FLOOR_VIOLATED)
        m_tilde_max = m_tilde
    else:
        for j in range(n):
            floor += ordered_p_min[j]
            if floor > lower_rhs:
                break
            m_tilde_max = j + 1
        if m_tilde_max < m_tilde:
            flags.append(FLAG_FLOOR_VIOLATED)
            m_tilde_max = m_tilde

    return CommitRange(m=m_tilde, m_max=m_tilde_max, reserve_r=reserve_at_m,
                       flags=tuple(flags))


@dataclass(frozen=True)
class SweepUnit:
    """Dispatch-facing view of one unit for the sweep."""
    a: float
    b: float
    c: float
    lower: float
    upper: float
    commit_penalty: float = 0.0  # charged when the unit is inside the prefix
    stop_penalty: float = 0.0  # charged when a previously-on unit is dropped
    stop_demand_credit: float = 0.0  # demand served by the first down period
    produces: bool = True  # False: starting unit ramping, no output this period


def sweep_dispatch(must_run_units, ordered_units, commit_range, demand,
                   parallel=False, max_width=None):
    """Evaluate economic dispatch for each prefix length k in the commit
    range and return (best_k, best_dispatch_outputs, best_objective, flags).

    Outputs are returned for must-run units first, then the ordered prefix
    (zeros for non-producing starters).  All-infeasible sweeps fall back to
    the max-effort emergency decision over every admissible unit.
    """
    lo_k, hi_k = commit_range.m, commit_range.m_max
    hi_k = min(hi_k, len(ordered_units))
    lo_k = min(lo_k, len(ordered_units))
    if max_width is not None:
        hi_k = min(hi_k, lo_k + max_width - 1)
    ks = list(range(lo_k, hi_k + 1))

    def evaluate(k):
        units = [DispatchUnit(u.a, u.b, u.c, u.lower, u.upper, 0.0)
                 for u in must_run_units]
        index = [("m", i) for i in range(len(must_run_units))]
        extra = 0.0
        dem = demand
        for j, u in enumerate(ordered_units):
            if j < k:
                extra += u.commit_penalty
                if u.produces:
                    units.append(DispatchUnit(u.a, u.b, u.c, u.lower, u.upper, 0.0))
                    index.append(("d", j))
            else:
                extra += u.stop_penalty
                dem -= u.stop_demand_credit
        if not units:
            return None
        d = economic_dispatch(DispatchProblem(units=units, demand=max(dem, 0.0)))
        if not d.feasible:
            return None
        return (d.objective + extra, k, d, index)

    if parallel and len(ks) > 1:
        results = list(_executor().map(evaluate, ks))
    else:
        results = [evaluate(k) for k in ks]

    best = None
    for r in results:
        if r is None:
            continue
        if best is None or (r[0], r[1]) < (best[0], best[1]):
            best = r
    if best is None:
        return _emergency(must_run_units, ordered_units, demand)

    obj, k, d, index = best
    outputs_m = np.zeros(len(must_run_units))
    outputs_d = np.zeros(len(ordered_units))
    for (kind, i), p in zip(index, d.outputs):
        if kind == "m":
            outputs_m[i] = p
        else:
            outputs_d[i] = p
    return k, outputs_m, outputs_d, obj, 0.0, []


def _emergency(must_run_units, ordered_units, demand):
    """Commit every admissible unit at max effort; flag any shortfall."""
    k = len(ordered_units)
    outputs_m = np.array([u.upper for u in must_run_units])
    outputs_d = np.array([u.upper if u.produces else 0.0 for u in ordered_units])
    supplied = float(np.sum(outputs_m)) + float(np.sum(outputs_d))
    obj = 0.0
    for u in must_run_units:
        obj += u.a * u.upper ** 2 + u.b * u.upper + u.c
    for u in ordered_units:
        obj += u.commit_penalty
        if u.produces:
            obj += u.a * u.upper ** 2 + u.b * u.upper + u.c
    shortfall = max(0.0, demand - supplied)
    return k, outputs_m, outputs_d, obj, shortfall, [FLAG_SHORTFALL]
