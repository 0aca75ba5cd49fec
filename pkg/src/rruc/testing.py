"""Single-period pipeline helper shared by oracle comparison and the tests."""

from collections import namedtuple

from .core import SweepUnit, find_commit_range, sweep_dispatch
from .relaxation import (RelaxationInfeasible, RelaxedProblem, RelaxedUnit,
                         order_candidates, solve_relaxed)
from .system import EngineConfig


class _SpecView:
    """Adapter giving OracleUnit the ordering interface of GeneratorSpec."""

    def __init__(self, unit, idx):
        self.unit = unit
        self.id = f"u{idx:03d}"

    def average_cost_at_p_typ(self):
        u = self.unit
        pt = (4.0 * u.p_max + u.p_min) / 5.0
        return u.a * pt + u.b + u.c / pt


SweepResult = namedtuple("SweepResult", ["objective", "committed"])


def sweep_single_period(problem, config=None):
    """Run relax -> order -> range -> sweep on a single-period instance and
    return the selected objective plus the committed discretionary index set
    (same switch-cost accounting as the exhaustive oracle: started and
    stopped units both pay their penalty)."""
    config = config or EngineConfig()
    disc = problem.discretionary
    mr = problem.must_run
    views = [_SpecView(u, i) for i, u in enumerate(disc)]
    reserve = max((u.p_max for u in list(disc) + list(mr)), default=0.0)
    mr_p_min = sum(u.p_min for u in mr)
    mr_p_max = sum(u.p_max for u in mr)

    relaxed = RelaxedProblem(
        units=[RelaxedUnit(a=u.a, b=u.b, c=u.c, p_lo=u.p_min, p_hi=u.p_max,
                           p_min=u.p_min, p_max=u.p_max,
                           switch_penalty=u.switch_penalty,
                           y0=1.0 if u.prev_committed else 0.0)
               for u in disc],
        demand=problem.demand,
        cap_requirement=problem.d_max_72 + 3.0 * problem.sigma_d + reserve,
        floor_allowance=problem.d_min_72 - problem.sigma_d,
        must_run_lo=mr_p_min, must_run_hi=mr_p_max,
    )
    try:
        sol = solve_relaxed(relaxed, tol=config.relax_tol,
                            max_outer=config.relax_max_outer,
                            max_inner=config.relax_max_inner)
        order = order_candidates(sol, views, fallback=not sol.converged)
    except RelaxationInfeasible:
        order = order_candidates(None, views, fallback=True)
    ordered = [disc[j] for j in order]

    rng = find_commit_range(
        ordered_p_max=[u.p_max for u in ordered],
        ordered_p_min=[u.p_min for u in ordered],
        must_run_p_max_sum=mr_p_max,
        must_run_p_min_sum=mr_p_min,
        must_run_r=max((u.p_max for u in mr), default=0.0),
        upper_rhs=problem.d_max_72 + 3.0 * problem.sigma_d,
        lower_rhs=problem.d_min_72 - problem.sigma_d,
    )

    mr_units = [SweepUnit(u.a, u.b, u.c, u.p_min, u.p_max) for u in mr]
    sw_units = [SweepUnit(
        u.a, u.b, u.c, u.p_min, u.p_max,
        commit_penalty=0.0 if u.prev_committed else u.switch_penalty,
        stop_penalty=u.switch_penalty if u.prev_committed else 0.0,
    ) for u in ordered]

    k, _om, _od, objective, _short, _flags = sweep_dispatch(
        mr_units, sw_units, rng, problem.demand,
        parallel=config.sweep_parallel, max_width=config.sweep_max_width)
    return SweepResult(objective=objective, committed=frozenset(order[:k]))
